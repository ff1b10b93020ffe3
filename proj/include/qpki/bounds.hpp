#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qpki::bounds {

// The constant pi^2/4 - pi^4/48 (~0.438045) appearing in every analytic
// bound below: with t queries available, no individual attack passes a
// single iteration with probability above 1 - c/(t+2)^2.
double security_constant();

// Upper bound on the per-iteration success of any t-query attack.
double per_iteration_bound(int t);

// Upper bound on the acceptance probability of the attacker's ell-th
// impersonation attempt when she started with t boxes: each failed attempt
// leaks at most one more box per sub-key, so attempt ell is bounded by a
// single attempt with t + ell - 1 boxes. s >= 0 (empty product allowed).
double attempt_bound(int ell, int t, int s);

struct BreakBound {
  double value;  // min(1, r * (1 - c/(2r+1)^2)^s)
  bool clamped;  // true when the union bound exceeded 1 and was clipped
};

// Union bound over all impersonation attempts a key's lifetime allows.
BreakBound break_probability_bound(int r, int s);

// Smallest s that provably pushes the break bound below epsilon: the least
// integer strictly greater than (2r+1)^2 ln(r/epsilon) / c. Sufficient but
// not tight; see required_s_exact.
int required_s(int r, double epsilon);

// Smallest s with r (1 - c/(2r+1)^2)^s < epsilon, solved directly. Never
// larger than required_s(r, epsilon).
int required_s_exact(int r, double epsilon);

struct BoundReport {
  int r = 0;
  int s = 0;
  int t_prime = 0;
  int t = 0;  // r + t_prime
  double c = 0.0;
  double per_iteration = 0.0;        // at t
  std::vector<double> per_attempt;   // ell = 1 .. r - t_prime
  double p_break = 0.0;
  bool clamped = false;
  std::optional<double> epsilon;
  std::optional<int> s_required;        // sufficient-condition mode
  std::optional<int> s_required_exact;  // direct solve
};

// Bound chain at given (r, s); t_prime is the attacker's head start.
BoundReport make_bound_report(int r, int s, int t_prime);

// Bound chain for a target failure probability; s is set to required_s.
BoundReport make_bound_report_epsilon(int r, double epsilon, int t_prime);

nlohmann::json bound_report_json(const BoundReport& rep);
std::string bound_report_text(const BoundReport& rep);

}  // namespace qpki::bounds
