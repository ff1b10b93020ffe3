#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpki/protocol.hpp"
#include "qpki/qla.hpp"
#include "qpki/rng.hpp"

namespace qpki::adversary {

// Thrown when an impersonation is attempted with no verification copies
// left for the attacker to burn.
class AttemptsExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Books the attacker's resources against one target key. Each sub-key is
// treated symmetrically, so a single counter per resource suffices:
//
//   * t_prime boxes come from public-key copies the attacker grabbed
//     (at most r-1, so at least one copy remains for a verifier);
//   * up to r more boxes come from runs where the attacker plays verifier
//     against the honest prover;
//   * black_boxes() = boxes_from_alice + t_prime, never above 2r-1;
//   * attempts_remaining starts at r - t_prime: the copies not taken by the
//     attacker are the only ones verifiers can still burn on her behalf.
class BlackBoxLedger {
 public:
  BlackBoxLedger(int r, int t_prime);
  static BlackBoxLedger fully_extracted(int r, int t_prime);

  int r() const { return r_; }
  int t_prime() const { return t_prime_; }
  int boxes_from_alice() const { return boxes_from_alice_; }
  int black_boxes() const { return boxes_from_alice_ + t_prime_; }
  int attempts_remaining() const { return attempts_remaining_; }

  void record_extraction();  // throws std::logic_error past r extractions
  void consume_attempt();    // throws AttemptsExhausted at zero

 private:
  int r_;
  int t_prime_;
  int boxes_from_alice_ = 0;
  int attempts_remaining_;
};

// The attacker's reference register after t key-phase queries, written in
// the (t+1)-dimensional orthonormal basis indexed by total query weight j.
// The physical register would need 2t+1 qubits; everything relevant lives in
// this span, so the simulator never leaves it.
struct EveState {
  int t;
  std::vector<qla::cplx> coeff;  // t+1 amplitudes, unit norm

  // Normalizes on construction; throws on a zero vector or size mismatch.
  EveState(int t_in, std::vector<qla::cplx> coeff_in);
};

// Adjacency matrix of the (t+1)-vertex path graph: ones on the two
// off-diagonals. Its largest eigenvalue, 2 cos(pi/(t+2)), controls the best
// possible guessing advantage with t queries.
qla::CMat path_adjacency(int t);

// The success-maximizing reference state: coefficients proportional to
// sin((j+1) pi / (t+2)), the top eigenvector of path_adjacency(t).
EveState optimal_eve_state(int t);

// The attacker's optimal two-outcome measurement on reference + challenge
// qubit. Outcome 0 is labelled "theta=0" (guess b = 0), outcome 1 is
// "theta=pi" (guess b = 1). Each element is a rank-(t+1) projector; the two
// sum to the identity on the 2(t+1)-dimensional joint space.
qla::Povm optimal_povm(int t);

// Per-iteration success probability of the optimal measurement for an
// arbitrary reference state a: 1/2 + (1/4) a^dag M a with M the path
// adjacency. The quadratic form is real for hermitian M; the imaginary
// residual is checked against 1e-12.
double analytic_success(const EveState& state);

// Joint state of reference register and challenge qubit in the reduced
// basis. Component layout: index j is |Xi_j>|0>, index (t+1)+j is |Xi_j>|1>,
// j = 0..t. The challenge qubit carries (|0> + (-1)^b e^{i phi} |1>)/sqrt(2)
// and each |Xi_j> picks up e^{i j phi}.
qla::CVec joint_state(const EveState& state, double phi, int bob_bit);

// Component index of |Xi_j>|sbit> in the layout above.
inline std::size_t reduced_index(int t, int j, int sbit) {
  return static_cast<std::size_t>(sbit) * (t + 1) + j;
}

struct AttackOutcome {
  int bob_bit;   // the verifier's hidden bit, sampled inside
  int guess;     // the attacker's announced bit
  bool success;  // guess == bob_bit
};

// One attack iteration against sub-key value x: samples the verifier's bit,
// forms the joint state at phase_of(x, r), measures the given two-outcome
// POVM and maps outcome "theta=0" to guess 0, "theta=pi" to guess 1.
AttackOutcome attack_iteration(const EveState& state, const qla::Povm& povm,
                               int x, int r, RngStream& rng);

enum class StrategyKind { random_guess, phase_estimation, optimal_individual };

// A per-iteration guessing strategy. Strategies are immutable after
// construction and safe to share across Monte Carlo worker threads.
class AttackStrategy {
 public:
  static AttackStrategy random_guess();
  static AttackStrategy phase_estimation(int t);
  static AttackStrategy optimal_individual(int t);

  StrategyKind kind() const { return kind_; }
  int t() const { return t_; }  // 0 for random_guess
  std::string name() const;
  nlohmann::json descriptor() const;

  AttackOutcome run_iteration(int x, int r, RngStream& rng) const;

 private:
  AttackStrategy(StrategyKind kind, int t);

  StrategyKind kind_;
  int t_;
  std::vector<qla::cplx> uniform_coeff_;  // phase-estimation register profile
  qla::Povm fourier_povm_;                // phase-estimation estimator basis
  qla::Povm povm_;                        // optimal_individual measurement
  std::vector<qla::cplx> state_coeff_;    // optimal_individual reference state
};

// Exact outcome distribution of the phase-estimation Fourier estimator for
// the uniform reference state at register phase phi (t+1 probabilities).
std::vector<double> fourier_outcome_distribution(int t, double phi);

// One full impersonation attempt against a verifier holding a fresh copy:
// burns one ledger attempt, consumes the copy, and plays strategy's guess on
// every sub-key. The verifier accepts iff all s replies are right.
protocol::Transcript impersonate(const AttackStrategy& strategy,
                                 BlackBoxLedger& ledger,
                                 const protocol::KeyIssuer& issuer,
                                 protocol::PublicKeyCopy& verifier_copy,
                                 RngStream& rng);

// The attacker plays dishonest verifier for one full protocol run, turning
// it into one more black-box query per sub-key. Consumes one prover run.
void extract_black_boxes(protocol::KeyIssuer& issuer, BlackBoxLedger& ledger);

}  // namespace qpki::adversary
