#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "qpki/qla.hpp"
#include "qpki/rng.hpp"

namespace qpki::protocol {

// Thrown when a prover is asked to run the protocol more than r times.
class UsageExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when more than r public-key copies are requested.
class CopyLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown on any attempt to reuse a consumed public-key qubit (or to start a
// verification with a partially consumed copy).
class ConsumedCopy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Params {
  int s = 0;  // sub-keys per key, one identification iteration each
  int r = 0;  // reusability budget: max public-key copies AND max prover runs
};

void validate_params(const Params& p);  // s >= 1, r >= 1

// Phase angle of key value x: 2*pi*x/(2r+1), for x in [1, 2r+1].
double phase_of(int x, int r);

struct PrivateKey {
  std::vector<int> x;  // s values, each uniform on [1, 2r+1]
};

// One issued copy of the public key: s single-qubit states
// (|0> + e^{i phase_of(x_j)} |1>)/sqrt(2), each usable exactly once.
struct PublicKeyCopy {
  int copy_id = -1;
  std::vector<qla::CVec> qubits;
  std::vector<bool> consumed;
  bool fresh() const;
};

// Holds the private key and enforces the two r-bounded budgets: copies
// issued and prover-side protocol runs.
class KeyIssuer {
 public:
  KeyIssuer(const Params& p, RngStream& rng);

  const Params& params() const { return p_; }
  const PrivateKey& key() const { return key_; }  // simulation-side view

  PublicKeyCopy issue_copy();
  void consume_prover_run();

  int copies_issued() const { return copies_issued_; }
  int prover_runs_used() const { return prover_runs_used_; }
  int prover_runs_remaining() const { return p_.r - prover_runs_used_; }

 private:
  Params p_;
  PrivateKey key_;
  int copies_issued_ = 0;
  int prover_runs_used_ = 0;
};

struct IterationRecord {
  int j;          // sub-key index
  int bob_bit;    // verifier's hidden bit b
  int reply_bit;  // prover's announced bit b'
  bool pass;      // reply_bit == bob_bit
};

struct Transcript {
  std::vector<IterationRecord> iterations;
  bool accept = false;
};

// One kernel iteration on sub-key j: the verifier hides b in the sign of the
// |1> amplitude of its j-th public-key qubit, the prover undoes the key
// phase and measures in the {|0>+|1>, |0>-|1>} basis. The qubit is consumed.
IterationRecord kernel_run(const KeyIssuer& issuer, PublicKeyCopy& copy, int j,
                           RngStream& rng);

// Full identification run: consumes one prover run and one fresh copy, runs
// all s kernel iterations, accepts iff every iteration passes.
Transcript identify(KeyIssuer& issuer, PublicKeyCopy& copy, RngStream& rng);

nlohmann::json transcript_json(const Transcript& t);
nlohmann::json private_key_json(const KeyIssuer& issuer, std::uint64_t seed);
nlohmann::json public_copy_json(const KeyIssuer& issuer, const PublicKeyCopy& copy);

}  // namespace qpki::protocol
