#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qpki/adversary.hpp"
#include "qpki/mc.hpp"
#include "qpki/protocol.hpp"
#include "qpki/qla.hpp"
#include "qpki/rng.hpp"

using namespace qpki::adversary;
namespace protocol = qpki::protocol;
using qpki::mix64;
using qpki::RngStream;
using qpki::qla::cplx;
using qpki::qla::CVec;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double closed_form_success(int t) { return 0.5 + 0.5 * std::cos(kPi / (t + 2)); }

// Monte Carlo single-iteration success of a strategy with fresh uniform
// sub-key values, at the smallest r consistent with its box count.
double mc_success(const AttackStrategy& strategy, int r, std::uint64_t trials,
                  std::uint64_t stream) {
  const std::uint64_t hits = qpki::mc::count_successes(
      trials, 42, stream, [&](RngStream& rng) {
        const int x = 1 + static_cast<int>(rng.below(2 * r + 1));
        return strategy.run_iteration(x, r, rng).success;
      });
  return static_cast<double>(hits) / trials;
}

}  // namespace

TEST_CASE("resource ledger accounting") {
  CHECK_THROWS_AS(BlackBoxLedger(2, 2), std::invalid_argument);  // t' > r-1
  CHECK_THROWS_AS(BlackBoxLedger(2, -1), std::invalid_argument);
  CHECK_THROWS_AS(BlackBoxLedger(0, 0), std::invalid_argument);

  BlackBoxLedger ledger(3, 1);
  CHECK(ledger.black_boxes() == 1);
  CHECK(ledger.attempts_remaining() == 2);
  for (int k = 0; k < 3; ++k) ledger.record_extraction();
  CHECK(ledger.black_boxes() == 4);  // r + t'
  CHECK_THROWS_AS(ledger.record_extraction(), std::logic_error);

  ledger.consume_attempt();
  ledger.consume_attempt();
  CHECK(ledger.attempts_remaining() == 0);
  CHECK_THROWS_AS(ledger.consume_attempt(), AttemptsExhausted);

  const BlackBoxLedger full = BlackBoxLedger::fully_extracted(3, 1);
  CHECK(full.black_boxes() == 4);
  CHECK(full.attempts_remaining() == 2);
}

TEST_CASE("reference states normalize and reject degenerate input") {
  EveState st(2, {cplx{3.0, 0.0}, cplx{0.0, 4.0}, cplx{0.0, 0.0}});
  double n2 = 0.0;
  for (const cplx& c : st.coeff) n2 += std::norm(c);
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(EveState(2, {cplx{}, cplx{}, cplx{}}), std::invalid_argument);
  CHECK_THROWS_AS(EveState(2, {cplx{1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("query-graph adjacency is the path matrix") {
  const auto m = path_adjacency(3);
  REQUIRE(m.rows() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double expect = (i + 1 == j || j + 1 == i) ? 1.0 : 0.0;
      CHECK(std::abs(m.at(i, j) - cplx{expect, 0.0}) < 1e-15);
    }
}

TEST_CASE("the optimal reference state is the sine profile") {
  const EveState st = optimal_eve_state(2);
  CHECK(std::abs(st.coeff[0] - cplx{0.5, 0.0}) < 1e-12);
  CHECK(std::abs(st.coeff[1] - cplx{std::sqrt(0.5), 0.0}) < 1e-12);
  CHECK(std::abs(st.coeff[2] - cplx{0.5, 0.0}) < 1e-12);
}

TEST_CASE("per-iteration success of the optimal state matches the closed form") {
  const double expect[] = {0.75, 0.8535533905932737, 0.9045084971874737,
                           0.9330127018922194};
  for (int t = 1; t <= 4; ++t)
    CHECK(std::abs(analytic_success(optimal_eve_state(t)) - expect[t - 1]) < 1e-12);
  CHECK(std::abs(analytic_success(optimal_eve_state(8)) - 0.9755282581475768) < 1e-12);
  CHECK(std::abs(analytic_success(optimal_eve_state(16)) - 0.9924038765061041) < 1e-12);
  // every valid state is at most as good
  RngStream rng(42, 300);
  for (int t = 1; t <= 6; ++t)
    for (int k = 0; k < 20; ++k) {
      std::vector<cplx> c(t + 1);
      for (cplx& v : c) v = cplx{rng.gaussian(), rng.gaussian()};
      CHECK(analytic_success(EveState(t, std::move(c))) <=
            closed_form_success(t) + 1e-12);
    }
}

TEST_CASE("the optimal measurement is a complete pair of rank-(t+1) projectors") {
  for (int t : {1, 2, 5, 12}) {
    const auto povm = optimal_povm(t);
    REQUIRE(povm.elements.size() == 2);
    CHECK(povm.elements[0].label == "theta=0");
    CHECK(povm.elements[1].label == "theta=pi");
    CHECK_NOTHROW(povm.validate());
    for (const auto& e : povm.elements) {
      // projector: E^2 = E
      CHECK((e.mat * e.mat - e.mat).max_abs() < 1e-12);
      CHECK(std::abs(e.mat.trace().real() - (t + 1)) < 1e-12);
    }
  }
}

TEST_CASE("joint state layout: reference weight phases and challenge sign") {
  const EveState st(1, {cplx{0.6, 0.0}, cplx{0.8, 0.0}});
  const double phi = 0.9;
  const CVec psi = joint_state(st, phi, 1);
  REQUIRE(psi.dim() == 4);
  const double rt2 = std::sqrt(2.0);
  CHECK(std::abs(psi[reduced_index(1, 0, 0)] - cplx{0.6 / rt2, 0.0}) < 1e-14);
  CHECK(std::abs(psi[reduced_index(1, 1, 0)] - std::polar(0.8 / rt2, phi)) < 1e-14);
  // b = 1 flips the sign of the challenge-excited half, which also carries
  // one extra phase
  CHECK(std::abs(psi[reduced_index(1, 0, 1)] - std::polar(-0.6 / rt2, phi)) < 1e-14);
  CHECK(std::abs(psi[reduced_index(1, 1, 1)] - std::polar(-0.8 / rt2, 2 * phi)) < 1e-14);
}

TEST_CASE("attack iterations hit the closed-form rate for every key value") {
  const int t = 2;
  const EveState st = optimal_eve_state(t);
  const auto povm = optimal_povm(t);
  const int r = 2;
  const std::uint64_t n = 100000;
  for (int x = 1; x <= 2 * r + 1; ++x) {
    const std::uint64_t hits = qpki::mc::count_successes(
        n, 42, mix64(301, x),
        [&](RngStream& rng) { return attack_iteration(st, povm, x, r, rng).success; });
    const double p = closed_form_success(t);
    CHECK(std::abs(static_cast<double>(hits) / n - p) <
          4.0 * std::sqrt(p * (1.0 - p) / n));
  }
}

TEST_CASE("strategy descriptors") {
  const AttackStrategy rg = AttackStrategy::random_guess();
  CHECK(rg.kind() == StrategyKind::random_guess);
  CHECK(rg.t() == 0);
  CHECK(rg.name() == "random");
  CHECK_FALSE(rg.descriptor().contains("t"));

  const AttackStrategy pe = AttackStrategy::phase_estimation(3);
  CHECK(pe.name() == "phase-est");
  CHECK(pe.t() == 3);
  CHECK(pe.descriptor().at("t") == 3);

  const AttackStrategy oi = AttackStrategy::optimal_individual(2);
  CHECK(oi.name() == "optimal");
  CHECK(oi.descriptor().at("strategy") == "optimal");
  CHECK_THROWS_AS(AttackStrategy::optimal_individual(0), std::invalid_argument);
  CHECK_THROWS_AS(AttackStrategy::phase_estimation(-1), std::invalid_argument);
}

TEST_CASE("random guessing wins half the iterations") {
  const double p = mc_success(AttackStrategy::random_guess(), 2, 200000, 302);
  CHECK(std::abs(p - 0.5) < 4.0 * std::sqrt(0.25 / 200000));
}

TEST_CASE("phase estimation: fourier statistics and success rates") {
  SUBCASE("outcome distribution is normalized and peaks at the grid") {
    const int t = 4;
    for (int y = 0; y <= t; ++y) {
      const auto p = fourier_outcome_distribution(t, 2.0 * kPi * y / (t + 1));
      double total = 0.0;
      for (double v : p) total += v;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(p[y] == doctest::Approx(1.0).epsilon(1e-12));  // exact grid phase
    }
    // off-grid phases peak at the nearest gridpoint
    const double phi = 2.0 * kPi * 1.8 / (t + 1);
    const auto p = fourier_outcome_distribution(t, phi);
    CHECK(std::max_element(p.begin(), p.end()) - p.begin() == 2);
  }
  SUBCASE("single-iteration success approaches the optimum from below") {
    // estimator quality is monotone in the number of boxes
    const double p1 = mc_success(AttackStrategy::phase_estimation(1), 1, 1000000, 303);
    const double p2 = mc_success(AttackStrategy::phase_estimation(2), 2, 1000000, 304);
    const double p4 = mc_success(AttackStrategy::phase_estimation(4), 3, 300000, 305);
    const double p8 = mc_success(AttackStrategy::phase_estimation(8), 5, 300000, 306);
    const double slack = 4.0 * std::sqrt(0.25 / 300000) * 1.5;
    CHECK(p1 < p2 + slack);
    CHECK(p2 < p4 + slack);
    CHECK(p4 < p8 + slack);
    // with one box the estimator is already optimal
    CHECK(std::abs(p1 - 0.75) < 4.0 * std::sqrt(0.75 * 0.25 / 1000000.0));
    // with two boxes it is strictly suboptimal
    const double sigma2 = std::sqrt(closed_form_success(2) * (1 - closed_form_success(2)) / 1000000.0);
    CHECK(p2 < closed_form_success(2) - 4.0 * sigma2);
  }
}

TEST_CASE("impersonation books resources and matches the product rate") {
  RngStream rng(42, 307);
  const int r = 2, s = 2, t_prime = 1;

  SUBCASE("strategy box count must match the ledger") {
    protocol::KeyIssuer issuer(protocol::Params{s, r}, rng);
    BlackBoxLedger ledger = BlackBoxLedger::fully_extracted(r, t_prime);
    protocol::PublicKeyCopy copy = issuer.issue_copy();
    const AttackStrategy wrong = AttackStrategy::optimal_individual(1);
    CHECK_THROWS_AS(impersonate(wrong, ledger, issuer, copy, rng),
                    std::invalid_argument);
  }
  SUBCASE("attempts are consumed and exhausted") {
    protocol::KeyIssuer issuer(protocol::Params{s, r}, rng);
    BlackBoxLedger ledger = BlackBoxLedger::fully_extracted(r, t_prime);
    const AttackStrategy strat = AttackStrategy::random_guess();
    protocol::PublicKeyCopy c1 = issuer.issue_copy();
    impersonate(strat, ledger, issuer, c1, rng);
    CHECK_FALSE(c1.fresh());
    CHECK(ledger.attempts_remaining() == 0);  // r - t' = 1
    protocol::PublicKeyCopy c2 = issuer.issue_copy();
    CHECK_THROWS_AS(impersonate(strat, ledger, issuer, c2, rng), AttemptsExhausted);
  }
  SUBCASE("a consumed verifier copy is rejected") {
    protocol::KeyIssuer issuer(protocol::Params{s, r}, rng);
    BlackBoxLedger ledger = BlackBoxLedger::fully_extracted(r, t_prime);
    protocol::PublicKeyCopy copy = issuer.issue_copy();
    qpki::protocol::kernel_run(issuer, copy, 0, rng);
    const AttackStrategy strat = AttackStrategy::random_guess();
    CHECK_THROWS_AS(impersonate(strat, ledger, issuer, copy, rng),
                    qpki::protocol::ConsumedCopy);
  }
  SUBCASE("random-guess impersonation accepts at rate 2^-s") {
    const std::uint64_t n = 100000;
    const std::uint64_t hits = qpki::mc::count_successes(
        n, 42, 308, [&](RngStream& trial) {
          protocol::KeyIssuer issuer(protocol::Params{s, r}, trial);
          BlackBoxLedger ledger = BlackBoxLedger::fully_extracted(r, t_prime);
          protocol::PublicKeyCopy copy = issuer.issue_copy();
          const AttackStrategy strat = AttackStrategy::random_guess();
          return impersonate(strat, ledger, issuer, copy, trial).accept;
        });
    CHECK(std::abs(static_cast<double>(hits) / n - 0.25) <
          4.0 * std::sqrt(0.25 * 0.75 / n));
  }
}

TEST_CASE("black-box extraction spends the prover's run budget") {
  RngStream rng(42, 309);
  const int r = 3;
  protocol::KeyIssuer issuer(protocol::Params{2, r}, rng);
  BlackBoxLedger ledger(r, 0);
  for (int k = 0; k < r; ++k) extract_black_boxes(issuer, ledger);
  CHECK(ledger.black_boxes() == r);
  CHECK(issuer.prover_runs_remaining() == 0);
  CHECK_THROWS_AS(extract_black_boxes(issuer, ledger),
                  qpki::protocol::UsageExhausted);
}
