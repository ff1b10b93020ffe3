#pragma once

#include <cmath>
#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

#include "qpki/rng.hpp"

namespace qpki::mc {

// Runs `trials` independent boolean trials and counts successes. Each trial
// owns a private RNG stream derived from (seed, stream_base, trial index),
// so the outcome of trial i never depends on how work is scheduled: serial
// and threaded runs of the same configuration produce identical counts.
// `trial` must be safe to invoke concurrently (it gets its own RngStream and
// should only read shared state).
template <class Trial>
std::uint64_t count_successes(std::uint64_t trials, std::uint64_t seed,
                              std::uint64_t stream_base, Trial&& trial,
                              unsigned threads = 0) {
  if (threads == 0) {
    threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
  }
  if (threads == 1 || trials < 2048) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      RngStream rng(seed, mix64(stream_base, i));
      if (trial(rng)) ++hits;
    }
    return hits;
  }
  std::vector<std::uint64_t> partial(threads, 0);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::uint64_t chunk = (trials + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min(trials, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, w] {
      std::uint64_t hits = 0;
      for (std::uint64_t i = lo; i < hi; ++i) {
        RngStream rng(seed, mix64(stream_base, i));
        if (trial(rng)) ++hits;
      }
      partial[w] = hits;
    });
  }
  for (auto& th : pool) th.join();
  std::uint64_t total = 0;
  for (std::uint64_t h : partial) total += h;  // order-independent reduction
  return total;
}

// Standard error of a binomial proportion estimate.
inline double binomial_stderr(double p_hat, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(n));
}

}  // namespace qpki::mc
