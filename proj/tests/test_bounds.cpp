#include <doctest.h>

#include <cmath>
#include <vector>

#include <json.hpp>

#include "qpki/bounds.hpp"

using namespace qpki::bounds;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double closed_form_success(int t) { return 0.5 + 0.5 * std::cos(kPi / (t + 2)); }

}  // namespace

TEST_CASE("the security constant and the first per-iteration bound") {
  CHECK(security_constant() ==
        doctest::Approx(kPi * kPi / 4.0 - std::pow(kPi, 4) / 48.0).epsilon(1e-15));
  CHECK(security_constant() == doctest::Approx(0.4380450370639557).epsilon(1e-15));
  CHECK(per_iteration_bound(1) == doctest::Approx(0.951328329215116).epsilon(1e-15));
}

TEST_CASE("the per-iteration bound dominates the attainable optimum") {
  for (int t = 1; t <= 64; ++t) {
    CHECK(per_iteration_bound(t) >= closed_form_success(t) - 1e-12);
    CHECK(per_iteration_bound(t) < 1.0);
  }
}

TEST_CASE("attempt bounds: powers, monotonicity, empty product") {
  for (int t : {1, 3, 7})
    for (int s : {1, 4, 16})
      CHECK(attempt_bound(1, t, s) ==
            doctest::Approx(std::pow(per_iteration_bound(t), s)).epsilon(1e-14));
  // each failed attempt can only leak information, so later attempts have
  // weaker guarantees
  for (int ell = 1; ell < 10; ++ell)
    CHECK(attempt_bound(ell, 3, 8) <= attempt_bound(ell + 1, 3, 8));
  CHECK(attempt_bound(1, 1, 0) == 1.0);
  CHECK_THROWS_AS(attempt_bound(0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(attempt_bound(1, 0, 1), std::invalid_argument);
}

TEST_CASE("break bound: frozen value, clamping, composition") {
  const BreakBound b = break_probability_bound(1, 95);
  CHECK_FALSE(b.clamped);
  CHECK(b.value == doctest::Approx(0.008737572926581689).epsilon(1e-15));
  CHECK(b.value < 0.01);

  const BreakBound clamped = break_probability_bound(4, 1);
  CHECK(clamped.clamped);
  CHECK(clamped.value == 1.0);

  // r p^(2s) = (r p^s)^2 / r whenever nothing clamps
  for (int r : {1, 2, 3})
    for (int s : {40, 80}) {
      const BreakBound one = break_probability_bound(r, s);
      const BreakBound two = break_probability_bound(r, 2 * s);
      if (!one.clamped && !two.clamped)
        CHECK(two.value == doctest::Approx(one.value * one.value / r).epsilon(1e-12));
    }
}

TEST_CASE("key-length sizing: sufficient condition vs direct solve") {
  CHECK(required_s(1, 0.01) == 95);
  CHECK(required_s_exact(1, 0.01) == 93);
  for (int r = 1; r <= 16; ++r)
    for (double eps : {0.1, 0.01, 0.001}) {
      const int s_thm = required_s(r, eps);
      const int s_exact = required_s_exact(r, eps);
      CHECK(s_exact <= s_thm);
      // both actually achieve the target
      CHECK(break_probability_bound(r, s_thm).value < eps);
      CHECK(break_probability_bound(r, s_exact).value < eps);
      // and the direct solve is minimal
      if (s_exact > 1)
        CHECK(break_probability_bound(r, s_exact - 1).value >= eps);
    }
  CHECK_THROWS_AS(required_s(0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(required_s(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(required_s(1, 1.5), std::invalid_argument);
}

TEST_CASE("every attempt bound is dominated by the worst-case factor") {
  // the chain behind the union bound: attempt ell with t = r + t' boxes is
  // bounded by the single-iteration bound at 2r+1 total resources
  for (int r : {1, 2, 5, 16})
    for (int t_prime : {0, r - 1})
      for (int s : {4, 64}) {
        const BoundReport rep = make_bound_report(r, s, t_prime);
        const double worst =
            std::pow(1.0 - security_constant() / std::pow(2.0 * r + 1.0, 2),
                     s);
        double total = 0.0;
        for (double a : rep.per_attempt) {
          CHECK(a <= worst + 1e-15);
          total += a;
        }
        CHECK(total <= r * worst + 1e-12);
        if (!rep.clamped)
          CHECK(rep.p_break == doctest::Approx(r * worst).epsilon(1e-12));
      }
}

TEST_CASE("bound reports carry the full chain in both modes") {
  const BoundReport rep = make_bound_report(3, 16, 1);
  CHECK(rep.r == 3);
  CHECK(rep.s == 16);
  CHECK(rep.t == 4);
  CHECK(static_cast<int>(rep.per_attempt.size()) == 2);  // r - t'
  CHECK(rep.per_iteration == doctest::Approx(per_iteration_bound(4)));
  CHECK_FALSE(rep.epsilon.has_value());

  const BoundReport eps_rep = make_bound_report_epsilon(2, 0.05, 0);
  REQUIRE(eps_rep.epsilon.has_value());
  REQUIRE(eps_rep.s_required.has_value());
  REQUIRE(eps_rep.s_required_exact.has_value());
  CHECK(eps_rep.s == *eps_rep.s_required);
  CHECK(eps_rep.p_break < 0.05);
  CHECK(*eps_rep.s_required_exact <= *eps_rep.s_required);

  const nlohmann::json j = bound_report_json(rep);
  for (const char* key : {"r", "s", "t_prime", "t", "c", "per_iteration_bound",
                          "per_attempt_bounds", "p_break_bound", "clamped"})
    CHECK(j.contains(key));
  CHECK_FALSE(j.contains("epsilon"));
  const nlohmann::json je = bound_report_json(eps_rep);
  CHECK(je.at("epsilon") == 0.05);
  CHECK(je.at("s_required") == *eps_rep.s_required);

  const std::string text = bound_report_text(rep);
  CHECK(text.find("p_break") != std::string::npos);
}
