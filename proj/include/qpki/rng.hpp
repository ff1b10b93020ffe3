#pragma once

#include <array>
#include <cstdint>

namespace qpki {

// Counter-based pseudorandom stream (Philox4x32-10).
//
// Every random decision in the simulator flows through one of these. The
// generator is keyed by a 64-bit master seed and a 64-bit stream id; the
// counter advances block by block, so a stream is a pure function of
// (seed, stream, position). That gives us two properties the experiment
// harness relies on:
//
//   * reproducibility: a report that records the master seed can be
//     regenerated bit-for-bit, on any platform;
//   * splittability: disjoint stream ids are statistically independent, so
//     Monte Carlo trials can each own a private stream and the reduction
//     order (serial or threaded) cannot change the result.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0,1) with 53 random bits.
  double uniform();

  // Fair coin, 0 or 1.
  int bit();

  // Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller (two uniforms per call, nothing cached).
  double gaussian();

  // Derived substream. Children of distinct (stream, k) pairs collide with
  // probability ~2^-64, which we accept.
  RngStream child(std::uint64_t k) const;

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;  // buffer exhausted; first draw refills
};

// splitmix64 finalizer. Used to spread structured ids (stream bases, trial
// indices) over the full 64-bit stream space.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

}  // namespace qpki
