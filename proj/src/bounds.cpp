#include "qpki/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qpki/fmt.hpp"

namespace qpki::bounds {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void check_r(int r) {
  if (r < 1) throw std::invalid_argument("bounds: r must be >= 1");
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("bounds: epsilon must be in (0, 1)");
}

double key_space_decay(int r) {
  // 1 - c/(2r+1)^2: the per-iteration bound with the key space saturated.
  const double m = 2.0 * r + 1.0;
  return 1.0 - security_constant() / (m * m);
}

}  // namespace

double security_constant() {
  return kPi * kPi / 4.0 - kPi * kPi * kPi * kPi / 48.0;
}

double per_iteration_bound(int t) {
  if (t < 1) throw std::invalid_argument("per_iteration_bound: t must be >= 1");
  const double d = static_cast<double>(t) + 2.0;
  return 1.0 - security_constant() / (d * d);
}

double attempt_bound(int ell, int t, int s) {
  if (ell < 1) throw std::invalid_argument("attempt_bound: ell must be >= 1");
  if (t < 1) throw std::invalid_argument("attempt_bound: t must be >= 1");
  if (s < 0) throw std::invalid_argument("attempt_bound: s must be >= 0");
  return std::pow(per_iteration_bound(t + ell - 1), s);
}

BreakBound break_probability_bound(int r, int s) {
  check_r(r);
  if (s < 1) throw std::invalid_argument("break_probability_bound: s must be >= 1");
  const double raw = static_cast<double>(r) * std::pow(key_space_decay(r), s);
  return BreakBound{std::min(1.0, raw), raw > 1.0};
}

int required_s(int r, double epsilon) {
  check_r(r);
  check_epsilon(epsilon);
  const double m = 2.0 * r + 1.0;
  const double v = m * m * std::log(static_cast<double>(r) / epsilon) / security_constant();
  // Least integer strictly greater than v; never below 1.
  const double f = std::floor(v) + 1.0;
  return static_cast<int>(std::max(1.0, f));
}

int required_s_exact(int r, double epsilon) {
  check_r(r);
  check_epsilon(epsilon);
  const double q = key_space_decay(r);
  // r q^s < epsilon  <=>  s > log(epsilon/r) / log(q); then nudge for
  // floating-point edge cases by direct evaluation.
  int s = static_cast<int>(std::max(
      1.0, std::floor(std::log(epsilon / static_cast<double>(r)) / std::log(q)) + 1.0));
  while (static_cast<double>(r) * std::pow(q, s) >= epsilon) ++s;
  while (s > 1 && static_cast<double>(r) * std::pow(q, s - 1) < epsilon) --s;
  return s;
}

namespace {

BoundReport fill_report(int r, int s, int t_prime) {
  check_r(r);
  if (s < 1) throw std::invalid_argument("bound report: s must be >= 1");
  if (t_prime < 0 || t_prime > r - 1)
    throw std::invalid_argument("bound report: t' must be in [0, r-1]");
  BoundReport rep;
  rep.r = r;
  rep.s = s;
  rep.t_prime = t_prime;
  rep.t = r + t_prime;
  rep.c = security_constant();
  rep.per_iteration = per_iteration_bound(rep.t);
  for (int ell = 1; ell <= r - t_prime; ++ell)
    rep.per_attempt.push_back(attempt_bound(ell, rep.t, s));
  const BreakBound bb = break_probability_bound(r, s);
  rep.p_break = bb.value;
  rep.clamped = bb.clamped;
  return rep;
}

}  // namespace

BoundReport make_bound_report(int r, int s, int t_prime) {
  return fill_report(r, s, t_prime);
}

BoundReport make_bound_report_epsilon(int r, double epsilon, int t_prime) {
  const int s = required_s(r, epsilon);
  BoundReport rep = fill_report(r, s, t_prime);
  rep.epsilon = epsilon;
  rep.s_required = s;
  rep.s_required_exact = required_s_exact(r, epsilon);
  return rep;
}

nlohmann::json bound_report_json(const BoundReport& rep) {
  nlohmann::json j{{"r", rep.r},
                   {"s", rep.s},
                   {"t_prime", rep.t_prime},
                   {"t", rep.t},
                   {"c", rep.c},
                   {"per_iteration_bound", rep.per_iteration},
                   {"per_attempt_bounds", rep.per_attempt},
                   {"p_break_bound", rep.p_break},
                   {"clamped", rep.clamped}};
  if (rep.epsilon) {
    j["epsilon"] = *rep.epsilon;
    j["s_required"] = *rep.s_required;
    j["s_required_exact"] = *rep.s_required_exact;
  }
  return j;
}

std::string bound_report_text(const BoundReport& rep) {
  std::ostringstream os;
  os << "security bound report\n";
  os << "  r = " << rep.r << "  s = " << rep.s << "  t' = " << rep.t_prime
     << "  t = " << rep.t << "\n";
  os << "  c                    " << fmt_double(rep.c) << "\n";
  os << "  per-iteration bound  " << fmt_double(rep.per_iteration) << "\n";
  for (std::size_t i = 0; i < rep.per_attempt.size(); ++i)
    os << "  attempt " << (i + 1) << " bound      " << fmt_double(rep.per_attempt[i])
       << "\n";
  os << "  p_break bound        " << fmt_double(rep.p_break)
     << (rep.clamped ? "  (clamped to 1)" : "") << "\n";
  if (rep.epsilon) {
    os << "  epsilon              " << fmt_double(*rep.epsilon) << "\n";
    os << "  s required           " << *rep.s_required << "\n";
    os << "  s required (exact)   " << *rep.s_required_exact << "\n";
  }
  return os.str();
}

}  // namespace qpki::bounds
