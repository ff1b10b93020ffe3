#include "qpki/adversary.hpp"

#include <cmath>

namespace qpki::adversary {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

void check_t(int t) {
  if (t < 1) throw std::invalid_argument("t must be >= 1");
}

// Shorthand for the shared layout helper.
inline std::size_t idx(int t, int j, int sbit) { return reduced_index(t, j, sbit); }

const qla::Povm& pm_basis_povm() {
  static const qla::Povm povm = [] {
    qla::CVec plus(2), minus(2);
    plus[0] = plus[1] = 1.0 / std::sqrt(2.0);
    minus[0] = 1.0 / std::sqrt(2.0);
    minus[1] = -1.0 / std::sqrt(2.0);
    return qla::Povm{{{"plus", qla::CMat::outer(plus, plus)},
                      {"minus", qla::CMat::outer(minus, minus)}}};
  }();
  return povm;
}

// Estimator basis for an n-component register: f_y[j] = e^{2 pi i j y/n} /
// sqrt(n). Outcome y estimates the register phase as 2 pi y / n.
qla::Povm fourier_basis_povm(int n) {
  qla::Povm povm;
  povm.elements.reserve(n);
  for (int y = 0; y < n; ++y) {
    qla::CVec f(n);
    for (int j = 0; j < n; ++j)
      f[j] = std::polar(1.0 / std::sqrt(double(n)), kTwoPi * j * y / n);
    povm.elements.push_back({"y=" + std::to_string(y), qla::CMat::outer(f, f)});
  }
  return povm;
}

}  // namespace

BlackBoxLedger::BlackBoxLedger(int r, int t_prime) : r_(r), t_prime_(t_prime) {
  if (r < 1) throw std::invalid_argument("BlackBoxLedger: r must be >= 1");
  if (t_prime < 0 || t_prime > r - 1)
    throw std::invalid_argument(
        "BlackBoxLedger: t' must be in [0, r-1] so a verifier copy remains");
  attempts_remaining_ = r - t_prime;
}

BlackBoxLedger BlackBoxLedger::fully_extracted(int r, int t_prime) {
  BlackBoxLedger ledger(r, t_prime);
  ledger.boxes_from_alice_ = r;
  return ledger;
}

void BlackBoxLedger::record_extraction() {
  if (boxes_from_alice_ >= r_)
    throw std::logic_error("BlackBoxLedger: all prover runs already extracted");
  ++boxes_from_alice_;
}

void BlackBoxLedger::consume_attempt() {
  if (attempts_remaining_ <= 0)
    throw AttemptsExhausted("BlackBoxLedger: no impersonation attempts left");
  --attempts_remaining_;
}

EveState::EveState(int t_in, std::vector<qla::cplx> coeff_in)
    : t(t_in), coeff(std::move(coeff_in)) {
  check_t(t);
  if (coeff.size() != static_cast<std::size_t>(t) + 1)
    throw std::invalid_argument("EveState: need t+1 coefficients");
  double n2 = 0.0;
  for (const qla::cplx& c : coeff) n2 += std::norm(c);
  if (n2 < 1e-300) throw std::invalid_argument("EveState: zero state");
  const double n = std::sqrt(n2);
  for (qla::cplx& c : coeff) c /= n;
}

qla::CMat path_adjacency(int t) {
  check_t(t);
  qla::CMat m(t + 1, t + 1);
  for (int j = 0; j < t; ++j) {
    m.at(j, j + 1) = 1.0;
    m.at(j + 1, j) = 1.0;
  }
  return m;
}

EveState optimal_eve_state(int t) {
  check_t(t);
  std::vector<qla::cplx> a(t + 1);
  for (int j = 0; j <= t; ++j)
    a[j] = std::sin((j + 1) * kPi / (t + 2));
  return EveState(t, std::move(a));  // constructor normalizes
}

qla::Povm optimal_povm(int t) {
  check_t(t);
  const std::size_t dim = 2 * (static_cast<std::size_t>(t) + 1);
  qla::CMat e0(dim, dim), epi(dim, dim);
  // Lone weight orbits: |Xi_0,0> can only occur with b = 0 and |Xi_t,1> only
  // with b = 1.
  e0.at(idx(t, 0, 0), idx(t, 0, 0)) = 1.0;
  epi.at(idx(t, t, 1), idx(t, t, 1)) = 1.0;
  // Two-dimensional weight orbits w = 2..t+1: project onto the even and odd
  // combinations of |Xi_{w-1},0> and |Xi_{w-2},1>.
  const double half = 0.5;
  for (int w = 2; w <= t + 1; ++w) {
    const std::size_t i0 = idx(t, w - 1, 0);
    const std::size_t i1 = idx(t, w - 2, 1);
    e0.at(i0, i0) = e0.at(i0, i0) + half;
    e0.at(i1, i1) = e0.at(i1, i1) + half;
    e0.at(i0, i1) = e0.at(i0, i1) + half;
    e0.at(i1, i0) = e0.at(i1, i0) + half;
    epi.at(i0, i0) = epi.at(i0, i0) + half;
    epi.at(i1, i1) = epi.at(i1, i1) + half;
    epi.at(i0, i1) = epi.at(i0, i1) - half;
    epi.at(i1, i0) = epi.at(i1, i0) - half;
  }
  return qla::Povm{{{"theta=0", e0}, {"theta=pi", epi}}};
}

double analytic_success(const EveState& state) {
  const qla::CMat m = path_adjacency(state.t);
  qla::CVec a(state.coeff.size());
  for (std::size_t i = 0; i < state.coeff.size(); ++i) a[i] = state.coeff[i];
  const qla::cplx form = a.dot(m * a);
  if (std::abs(form.imag()) > qla::kStructuralTol)
    throw std::runtime_error("analytic_success: quadratic form not real");
  return 0.5 + 0.25 * form.real();
}

qla::CVec joint_state(const EveState& state, double phi, int bob_bit) {
  if (bob_bit != 0 && bob_bit != 1)
    throw std::invalid_argument("joint_state: bob_bit must be 0 or 1");
  const int t = state.t;
  qla::CVec psi(2 * (static_cast<std::size_t>(t) + 1));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double sign = bob_bit ? -1.0 : 1.0;
  for (int j = 0; j <= t; ++j) {
    const qla::cplx aj = state.coeff[j] * std::polar(1.0, j * phi);
    psi[idx(t, j, 0)] = aj * inv_sqrt2;
    psi[idx(t, j, 1)] = aj * std::polar(sign, phi) * inv_sqrt2;
  }
  return psi;
}

AttackOutcome attack_iteration(const EveState& state, const qla::Povm& povm,
                               int x, int r, RngStream& rng) {
  const int b = rng.bit();
  const qla::CVec psi = joint_state(state, protocol::phase_of(x, r), b);
  const std::size_t outcome = qla::measure_povm(psi, povm, rng);
  const int guess = outcome == 0 ? 0 : 1;
  return AttackOutcome{b, guess, guess == b};
}

AttackStrategy::AttackStrategy(StrategyKind kind, int t) : kind_(kind), t_(t) {
  if (kind == StrategyKind::phase_estimation) {
    const int n = t + 1;
    uniform_coeff_.assign(n, qla::cplx{1.0 / std::sqrt(double(n)), 0.0});
    fourier_povm_ = fourier_basis_povm(n);
  } else if (kind == StrategyKind::optimal_individual) {
    povm_ = optimal_povm(t);
    state_coeff_ = optimal_eve_state(t).coeff;
  }
}

AttackStrategy AttackStrategy::random_guess() {
  return AttackStrategy(StrategyKind::random_guess, 0);
}

AttackStrategy AttackStrategy::phase_estimation(int t) {
  check_t(t);
  return AttackStrategy(StrategyKind::phase_estimation, t);
}

AttackStrategy AttackStrategy::optimal_individual(int t) {
  check_t(t);
  return AttackStrategy(StrategyKind::optimal_individual, t);
}

std::string AttackStrategy::name() const {
  switch (kind_) {
    case StrategyKind::random_guess: return "random";
    case StrategyKind::phase_estimation: return "phase-est";
    case StrategyKind::optimal_individual: return "optimal";
  }
  return "unknown";
}

nlohmann::json AttackStrategy::descriptor() const {
  nlohmann::json d{{"strategy", name()}};
  if (kind_ != StrategyKind::random_guess) d["t"] = t_;
  return d;
}

AttackOutcome AttackStrategy::run_iteration(int x, int r, RngStream& rng) const {
  switch (kind_) {
    case StrategyKind::random_guess: {
      const int b = rng.bit();
      const int guess = rng.bit();
      return AttackOutcome{b, guess, guess == b};
    }
    case StrategyKind::optimal_individual: {
      const EveState state(t_, state_coeff_);
      return attack_iteration(state, povm_, x, r, rng);
    }
    case StrategyKind::phase_estimation: {
      const int b = rng.bit();
      const double phi = protocol::phase_of(x, r);
      const int n = t_ + 1;
      // Register picks up e^{i j phi}; estimate the phase in the Fourier
      // basis, then undo the estimate on the challenge qubit and measure.
      qla::CVec reg(n);
      for (int j = 0; j < n; ++j)
        reg[j] = uniform_coeff_[j] * std::polar(1.0, j * phi);
      const std::size_t y = qla::measure_povm(reg, fourier_povm_, rng);
      const double estimate = kTwoPi * static_cast<double>(y) / n;
      qla::CVec challenge(2);
      challenge[0] = 1.0 / std::sqrt(2.0);
      challenge[1] = std::polar(b ? -1.0 / std::sqrt(2.0) : 1.0 / std::sqrt(2.0), phi);
      challenge = qla::phase_gate(-estimate) * challenge;
      const int guess = static_cast<int>(qla::measure_povm(challenge, pm_basis_povm(), rng));
      return AttackOutcome{b, guess, guess == b};
    }
  }
  throw std::logic_error("AttackStrategy: unknown kind");
}

std::vector<double> fourier_outcome_distribution(int t, double phi) {
  check_t(t);
  const int n = t + 1;
  qla::CVec reg(n);
  for (int j = 0; j < n; ++j)
    reg[j] = std::polar(1.0 / std::sqrt(double(n)), j * phi);
  return qla::outcome_probabilities(reg, fourier_basis_povm(n));
}

protocol::Transcript impersonate(const AttackStrategy& strategy,
                                 BlackBoxLedger& ledger,
                                 const protocol::KeyIssuer& issuer,
                                 protocol::PublicKeyCopy& verifier_copy,
                                 RngStream& rng) {
  const protocol::Params& p = issuer.params();
  if (ledger.r() != p.r)
    throw std::invalid_argument("impersonate: ledger and issuer disagree on r");
  if (strategy.kind() != StrategyKind::random_guess &&
      strategy.t() != ledger.black_boxes())
    throw std::invalid_argument("impersonate: strategy t does not match ledger");
  if (!verifier_copy.fresh())
    throw protocol::ConsumedCopy("impersonate: verifier copy is not fresh");
  ledger.consume_attempt();
  protocol::Transcript tr;
  tr.accept = true;
  tr.iterations.reserve(p.s);
  for (int j = 0; j < p.s; ++j) {
    verifier_copy.consumed[j] = true;
    const AttackOutcome out = strategy.run_iteration(issuer.key().x[j], p.r, rng);
    tr.iterations.push_back({j, out.bob_bit, out.guess, out.success});
    tr.accept = tr.accept && out.success;
  }
  return tr;
}

void extract_black_boxes(protocol::KeyIssuer& issuer, BlackBoxLedger& ledger) {
  if (ledger.r() != issuer.params().r)
    throw std::invalid_argument("extract_black_boxes: ledger and issuer disagree on r");
  // The issuer is the authority on the run budget, so let it refuse first;
  // record_extraction still guards against a ledger paired with the wrong
  // issuer.
  issuer.consume_prover_run();
  ledger.record_extraction();
}

}  // namespace qpki::adversary
