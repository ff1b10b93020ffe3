#include "qpki/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "qpki/eig.hpp"
#include "qpki/mc.hpp"
#include "qpki/protocol.hpp"

namespace qpki::oracle {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

using adversary::EveState;
using adversary::joint_state;
using adversary::optimal_eve_state;
using adversary::optimal_povm;
using adversary::reduced_index;
using qla::CMat;
using qla::CVec;
using qla::cplx;

// Total query weight of reduced-basis component `index`: |Xi_j>|0> carries
// weight j+1 and |Xi_j>|1> carries weight j+2, so components interfere only
// within equal-weight orbits.
int weight_of(int t, std::size_t index) {
  const std::size_t n = static_cast<std::size_t>(t) + 1;
  return index < n ? static_cast<int>(index) + 1 : static_cast<int>(index - n) + 2;
}

CMat orbit_mat(const EveState& state, double theta) {
  const int t = state.t;
  const CVec psi = joint_state(state, 0.0, 0);
  const std::size_t dim = 2 * (static_cast<std::size_t>(t) + 1);
  CMat rho(dim, dim);
  // Average over the key phase: coherence survives only inside each weight
  // orbit, which holds at most the two components |Xi_{w-1}>|0>, |Xi_{w-2}>|1>.
  for (int w = 1; w <= t + 2; ++w) {
    std::size_t members[2];
    int count = 0;
    if (w - 1 <= t) members[count++] = reduced_index(t, w - 1, 0);
    if (w >= 2) members[count++] = reduced_index(t, w - 2, 1);
    for (int a = 0; a < count; ++a)
      for (int b = 0; b < count; ++b)
        rho.at(members[a], members[b]) =
            rho.at(members[a], members[b]) + psi[members[a]] * std::conj(psi[members[b]]);
  }
  // Challenge rotation diag(1, e^{i theta}) on the qubit: entry (i, j) picks
  // up e^{i theta (s_i - s_j)}.
  if (theta != 0.0) {
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        const int si = i < dim / 2 ? 0 : 1;
        const int sj = j < dim / 2 ? 0 : 1;
        if (si != sj)
          rho.at(i, j) = rho.at(i, j) * std::polar(1.0, theta * (si - sj));
      }
  }
  return rho;
}

// Helstrom value without density validation; the ascent calls this hundreds
// of thousands of times on operators that are valid by construction.
double helstrom_unchecked(const EveState& state) {
  const CMat diff = orbit_mat(state, 0.0) - orbit_mat(state, kPi);
  return 0.5 + 0.25 * qla::trace_norm(diff);
}

double ascent_objective(int t, const std::vector<double>& a) {
  std::vector<cplx> c(a.begin(), a.end());
  return helstrom_unchecked(EveState(t, std::move(c)));  // normalizes internally
}

struct AscentRun {
  std::vector<double> a;
  double f = 0.0;
  bool converged = false;
};

// Projected gradient ascent from the given start. The objective is scale
// invariant (the state is normalized before evaluation), so finite
// differences of it are already tangent up to curvature; we project anyway.
AscentRun ascend(int t, std::vector<double> a, int max_iters) {
  const int n = t + 1;
  const double fd_h = 1e-5;
  // Near the maximum the per-step improvement drops below the rounding
  // noise of the objective while the gradient is still around 1e-8, so a
  // tighter criterion than this is unreachable: the line search stalls
  // first. At 1e-6 the residual success error is ~|g|^2 against a unit-ish
  // curvature, far inside the 1e-6 acceptance tolerance.
  const double grad_tol = 1e-6;
  double norm = 0.0;
  for (double v : a) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : a) v /= norm;
  double f = ascent_objective(t, a);
  std::vector<double> g(n), cand(n);
  bool converged = false;
  for (int iter = 0; iter < max_iters; ++iter) {
    for (int i = 0; i < n; ++i) {
      const double keep = a[i];
      a[i] = keep + fd_h;
      const double fp = ascent_objective(t, a);
      a[i] = keep - fd_h;
      const double fm = ascent_objective(t, a);
      a[i] = keep;
      g[i] = (fp - fm) / (2.0 * fd_h);
    }
    double ga = 0.0;
    for (int i = 0; i < n; ++i) ga += g[i] * a[i];
    double gn2 = 0.0;
    for (int i = 0; i < n; ++i) {
      g[i] -= ga * a[i];
      gn2 += g[i] * g[i];
    }
    if (std::sqrt(gn2) <= grad_tol) {
      converged = true;
      break;
    }
    double step = 0.05;
    bool moved = false;
    while (step > 1e-14) {
      double cn2 = 0.0;
      for (int i = 0; i < n; ++i) {
        cand[i] = a[i] + step * g[i];
        cn2 += cand[i] * cand[i];
      }
      const double cn = std::sqrt(cn2);
      for (int i = 0; i < n; ++i) cand[i] /= cn;
      const double fc = ascent_objective(t, cand);
      if (fc > f) {
        a = cand;
        f = fc;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // no ascent direction at any step length
  }
  return AscentRun{std::move(a), f, converged};
}

}  // namespace

double helstrom_success(const qla::DensityOperator& rho0,
                        const qla::DensityOperator& rho1) {
  rho0.validate();
  rho1.validate();
  if (rho0.mat.rows() != rho1.mat.rows())
    throw std::invalid_argument("helstrom_success: dimension mismatch");
  return 0.5 + 0.25 * qla::trace_norm(rho0.mat - rho1.mat);
}

qla::DensityOperator orbit_density(const adversary::EveState& state, double theta) {
  const bool is_zero = std::abs(theta) <= qla::kStructuralTol;
  const bool is_pi = std::abs(theta - kPi) <= qla::kStructuralTol;
  if (!is_zero && !is_pi)
    throw std::invalid_argument("orbit_density: theta must be 0 or pi");
  return qla::DensityOperator{orbit_mat(state, is_pi ? kPi : 0.0)};
}

double orbit_quadrature_deviation(const adversary::EveState& state, int nodes) {
  if (nodes < 2) throw std::invalid_argument("orbit_quadrature_deviation: nodes < 2");
  const std::size_t dim = 2 * (static_cast<std::size_t>(state.t) + 1);
  CMat acc(dim, dim);
  for (int k = 0; k < nodes; ++k) {
    const CVec psi = joint_state(state, kTwoPi * k / nodes, 0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        acc.at(i, j) = acc.at(i, j) + psi[i] * std::conj(psi[j]);
  }
  acc = acc * cplx{1.0 / nodes, 0.0};
  return (acc - orbit_mat(state, 0.0)).max_abs();
}

double orbit_offblock_deviation(const adversary::EveState& state) {
  const CMat rho = orbit_mat(state, 0.0);
  double dev = 0.0;
  for (std::size_t i = 0; i < rho.rows(); ++i)
    for (std::size_t j = 0; j < rho.cols(); ++j)
      if (weight_of(state.t, i) != weight_of(state.t, j))
        dev = std::max(dev, std::abs(rho.at(i, j)));
  return dev;
}

AscentResult brute_force_optimal_attack(int t, int restarts, RngStream& rng) {
  if (t < 1) throw std::invalid_argument("brute_force_optimal_attack: t must be >= 1");
  if (restarts < 1)
    throw std::invalid_argument("brute_force_optimal_attack: restarts must be >= 1");
  const int n = t + 1;
  AscentResult result;
  result.restarts = restarts;
  AscentRun best;
  for (int k = 0; k < restarts; ++k) {
    RngStream sub = rng.child(k);
    std::vector<double> start(n);
    for (double& v : start) v = sub.gaussian();
    AscentRun run = ascend(t, std::move(start), 250);
    if (run.converged) ++result.converged;
    if (run.f > best.f) best = std::move(run);
  }
  // Polish the winner until the gradient criterion is met. The short
  // restart budget above favors coverage; convergence is the polish's job,
  // and it counts toward `converged` like any other run.
  if (!best.converged) {
    AscentRun polished = ascend(t, best.a, 20000);
    if (polished.f >= best.f) best = std::move(polished);
    if (best.converged) ++result.converged;
  }
  result.best_success = best.f;
  result.best_profile.resize(n);
  for (int i = 0; i < n; ++i) result.best_profile[i] = std::abs(best.a[i]);
  return result;
}

EigOracleResult eig_oracle(int t) {
  if (t < 1) throw std::invalid_argument("eig_oracle: t must be >= 1");
  const int n = t + 1;
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j + 1 < n; ++j) {
    m[j * n + j + 1] = 1.0;
    m[(j + 1) * n + j] = 1.0;
  }
  std::vector<double> mcopy = m, evals, evecs;
  qla::sym_eig(mcopy, n, evals, &evecs);
  if (n >= 2 && evals[n - 1] - evals[n - 2] <= 1e-9)
    throw std::runtime_error("eig_oracle: top eigenvalue is degenerate");
  EigOracleResult res;
  res.lambda_max = evals[n - 1];
  // Residual of the returned eigenpair under the original matrix.
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double mv = 0.0;
    for (int j = 0; j < n; ++j) mv += m[i * n + j] * evecs[j * n + (n - 1)];
    const double diff = mv - res.lambda_max * evecs[i * n + (n - 1)];
    r2 += diff * diff;
  }
  res.residual = std::sqrt(r2);
  // The top eigenvector of a path graph is the sine profile; compare
  // magnitudes to stay sign-convention free.
  std::vector<double> profile(n);
  double pn = 0.0;
  for (int j = 0; j < n; ++j) {
    profile[j] = std::sin((j + 1) * kPi / (t + 2));
    pn += profile[j] * profile[j];
  }
  pn = std::sqrt(pn);
  for (int j = 0; j < n; ++j)
    res.profile_deviation = std::max(
        res.profile_deviation,
        std::abs(std::abs(evecs[j * n + (n - 1)]) - profile[j] / pn));
  return res;
}

PolySpec PolySpec::random(int d, int N, RngStream& rng) {
  if (d < 0 || N < 1) throw std::invalid_argument("PolySpec::random: bad shape");
  PolySpec spec;
  spec.d = d;
  spec.N = N;
  spec.beta.resize(static_cast<std::size_t>(d + 1) * N);
  double n2 = 0.0;
  for (cplx& b : spec.beta) {
    b = cplx{rng.gaussian(), rng.gaussian()};
    n2 += std::norm(b);
  }
  const double n = std::sqrt(n2);
  for (cplx& b : spec.beta) b /= n;
  return spec;
}

PolySpec PolySpec::aliasing_witness(int r) {
  if (r < 1) throw std::invalid_argument("PolySpec::aliasing_witness: r must be >= 1");
  PolySpec spec;
  spec.d = 2 * r + 1;
  spec.N = 1;
  spec.beta.assign(static_cast<std::size_t>(spec.d) + 1, cplx{});
  const double w = 1.0 / std::sqrt(2.0);
  spec.beta.front() = w;
  spec.beta.back() = w;
  return spec;
}

double discrete_continuous_check(int r, const PolySpec& spec) {
  if (r < 1) throw std::invalid_argument("discrete_continuous_check: r must be >= 1");
  const int n_keys = 2 * r + 1;
  const int N = spec.N;
  CMat discrete(N, N);
  for (int x = 1; x <= n_keys; ++x) {
    const double phi = kTwoPi * x / n_keys;
    CVec psi(N);
    for (int k = 0; k < N; ++k) {
      cplx v = 0.0;
      for (int j = 0; j <= spec.d; ++j) v += spec.at(j, k) * std::polar(1.0, j * phi);
      psi[k] = v;
    }
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        discrete.at(a, b) = discrete.at(a, b) + psi[a] * std::conj(psi[b]);
  }
  discrete = discrete * cplx{1.0 / n_keys, 0.0};
  CMat target(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      cplx v = 0.0;
      for (int j = 0; j <= spec.d; ++j) v += spec.at(j, a) * std::conj(spec.at(j, b));
      target.at(a, b) = v;
    }
  return (discrete - target).max_abs();
}

std::pair<int, int> canonical_r_tprime(int t) {
  if (t < 1) throw std::invalid_argument("canonical_r_tprime: t must be >= 1");
  const int r = t / 2 + 1;
  return {r, t - r};
}

namespace {

// Exact Born-rule success of the optimal attack against key value x.
double exact_iteration_success(const EveState& state, const qla::Povm& povm,
                               int x, int r) {
  double total = 0.0;
  for (int b = 0; b < 2; ++b) {
    const CVec psi = joint_state(state, protocol::phase_of(x, r), b);
    total += qla::outcome_probabilities(psi, povm)[b];
  }
  return total / 2.0;
}

}  // namespace

double povm_route_success(int t) {
  const auto [r, t_prime] = canonical_r_tprime(t);
  (void)t_prime;
  const EveState state = optimal_eve_state(t);
  const qla::Povm povm = optimal_povm(t);
  double mean = 0.0;
  for (int x = 1; x <= 2 * r + 1; ++x)
    mean += exact_iteration_success(state, povm, x, r);
  return mean / (2 * r + 1);
}

double povm_phase_invariance_deviation(int t, int n_states, RngStream& rng) {
  if (t < 1 || n_states < 1)
    throw std::invalid_argument("povm_phase_invariance_deviation: bad arguments");
  const qla::Povm povm = optimal_povm(t);
  double dev = 0.0;
  for (int k = 0; k < n_states; ++k) {
    std::vector<cplx> coeff(t + 1);
    for (cplx& c : coeff) c = cplx{rng.gaussian(), rng.gaussian()};
    const EveState state(t, std::move(coeff));
    const double phi1 = kTwoPi * rng.uniform();
    const double phi2 = kTwoPi * rng.uniform();
    for (int b = 0; b < 2; ++b) {
      const auto p1 = qla::outcome_probabilities(joint_state(state, phi1, b), povm);
      const auto p2 = qla::outcome_probabilities(joint_state(state, phi2, b), povm);
      for (std::size_t i = 0; i < p1.size(); ++i)
        dev = std::max(dev, std::abs(p1[i] - p2[i]));
    }
  }
  return dev;
}

ProductRuleReport product_rule_check(int t, int s, std::uint64_t trials,
                                     std::uint64_t seed) {
  if (s < 1) throw std::invalid_argument("product_rule_check: s must be >= 1");
  const auto [r, t_prime] = canonical_r_tprime(t);
  (void)t_prime;
  ProductRuleReport rep;
  rep.t = t;
  rep.s = s;
  rep.r_used = r;
  const EveState state = optimal_eve_state(t);
  const qla::Povm povm = optimal_povm(t);
  // Per-iteration value through the Born rule, averaged over the key space.
  double alpha = 0.0;
  for (int x = 1; x <= 2 * r + 1; ++x)
    alpha += exact_iteration_success(state, povm, x, r);
  alpha /= 2 * r + 1;
  rep.alpha = alpha;
  // Iterations are independent (fresh sub-key, fresh challenge bit, fresh
  // measurement), so the s-round acceptance is the literal product.
  double acceptance = 1.0;
  for (int j = 0; j < s; ++j) acceptance *= alpha;
  rep.analytic_acceptance = acceptance;
  rep.alpha_pow_s = std::pow(0.5 + 0.5 * std::cos(kPi / (t + 2)), s);
  rep.analytic_deviation = std::abs(rep.analytic_acceptance - rep.alpha_pow_s);
  if (trials > 0) {
    rep.mc_trials = trials;
    const std::uint64_t base = mix64(0x70726f64756374ULL, // "product"
                                     (static_cast<std::uint64_t>(t) << 32) | s);
    const std::uint64_t hits = mc::count_successes(
        trials, seed, base, [&](RngStream& trial_rng) {
          for (int j = 0; j < s; ++j) {
            const int x = 1 + static_cast<int>(trial_rng.below(2 * r + 1));
            if (!adversary::attack_iteration(state, povm, x, r, trial_rng).success)
              return false;
          }
          return true;
        });
    rep.mc_acceptance = static_cast<double>(hits) / trials;
    rep.mc_stderr = mc::binomial_stderr(rep.alpha_pow_s, trials);
  }
  return rep;
}

const char* kScopeNote =
    "Scope: these checks certify the analytic bounds and the optimal "
    "individual (per-copy) attack, plus one-sided attainability of the "
    "s-round product rule. The claim that no coherent attack across copies "
    "and rounds beats the per-round optimum rests on a semidefinite-"
    "programming argument about interactive strategies; it is not "
    "reproducible by finite simulation and is not checked here.";

namespace {

void add_check(std::vector<CheckResult>& out, CheckResult res) {
  out.push_back(std::move(res));
}

bool wanted(const VerifyOptions& opt, const char* name) {
  return opt.only.empty() || opt.only == name;
}

}  // namespace

std::vector<CheckResult> run_verification_suite(const VerifyOptions& opt) {
  if (opt.t_max_matrix < 1 || opt.t_max_matrix > 16)
    throw std::invalid_argument("verify: t_max_matrix must be in [1, 16]");
  if (opt.t_max_brute < 1 || opt.t_max_brute > 8)
    throw std::invalid_argument("verify: t_max_brute must be in [1, 8]");
  std::vector<CheckResult> out;
  RngStream rng(opt.seed, 0x766572696679ULL);  // "verify"

  if (wanted(opt, "eig")) {
    double dev = 0.0;
    for (int t = 1; t <= opt.t_max_matrix; ++t) {
      const EigOracleResult res = eig_oracle(t);
      dev = std::max({dev, std::abs(res.lambda_max - 2.0 * std::cos(kPi / (t + 2))),
                      res.residual, res.profile_deviation});
    }
    add_check(out,
              {"eig", {{"t_max", opt.t_max_matrix}}, dev, 1e-9, dev <= 1e-9});
  }

  if (wanted(opt, "povm")) {
    double dev = 0.0;
    for (int t = 1; t <= opt.t_max_matrix; ++t) {
      qla::Povm povm = optimal_povm(t);
      if (opt.inject_povm_fault)
        povm.elements[0].mat.at(0, 0) = povm.elements[0].mat.at(0, 0) + 0.001;
      const std::size_t dim = povm.dim();
      CMat sum(dim, dim);
      for (const qla::PovmElement& e : povm.elements) {
        if (!e.mat.is_hermitian()) dev = std::max(dev, 1.0);
        const auto evs = qla::hermitian_eigvals(e.mat);
        dev = std::max(dev, std::max(0.0, -evs.front()));
        int rank = 0;
        for (double v : evs)
          if (v > 0.5) ++rank;
        if (rank != t + 1) dev = std::max(dev, 1.0);
        sum = sum + e.mat;
      }
      dev = std::max(dev, (sum - CMat::identity(dim)).max_abs());
    }
    add_check(out,
              {"povm",
               {{"t_max", opt.t_max_matrix}, {"fault_injected", opt.inject_povm_fault}},
               dev,
               1e-9,
               dev <= 1e-9});
  }

  if (wanted(opt, "povm-invariance")) {
    double dev = 0.0;
    RngStream sub = rng.child(1);
    for (int t = 1; t <= opt.t_max_matrix; ++t)
      dev = std::max(dev, povm_phase_invariance_deviation(t, 20, sub));
    add_check(out,
              {"povm-invariance",
               {{"t_max", opt.t_max_matrix}, {"states_per_t", 20}},
               dev,
               1e-9,
               dev <= 1e-9});
  }

  if (wanted(opt, "orbit")) {
    double dev = 0.0;
    RngStream sub = rng.child(2);
    const int t_cap = std::min(opt.t_max_matrix, 8);
    for (int t = 1; t <= t_cap; ++t) {
      std::vector<EveState> states;
      states.push_back(optimal_eve_state(t));
      for (int k = 0; k < 2; ++k) {
        std::vector<cplx> coeff(t + 1);
        for (cplx& c : coeff) c = cplx{sub.gaussian(), sub.gaussian()};
        states.emplace_back(t, std::move(coeff));
      }
      for (const EveState& st : states) {
        dev = std::max(dev, orbit_offblock_deviation(st));
        dev = std::max(dev, orbit_quadrature_deviation(st));
        orbit_density(st, 0.0).validate();
        orbit_density(st, kPi).validate();
      }
    }
    add_check(out, {"orbit", {{"t_max", t_cap}}, dev, 1e-9, dev <= 1e-9});
  }

  if (wanted(opt, "routes")) {
    double dev = 0.0;
    for (int t = 1; t <= opt.t_max_brute; ++t) {
      const EveState st = optimal_eve_state(t);
      const double closed = 0.5 + 0.5 * std::cos(kPi / (t + 2));
      const double values[] = {
          closed,
          adversary::analytic_success(st),
          0.5 + 0.25 * eig_oracle(t).lambda_max,
          povm_route_success(t),
          helstrom_success(orbit_density(st, 0.0), orbit_density(st, kPi)),
      };
      for (double v : values)
        for (double w : values) dev = std::max(dev, std::abs(v - w));
    }
    add_check(out,
              {"routes", {{"t_max", opt.t_max_brute}}, dev, 1e-9, dev <= 1e-9});
  }

  if (wanted(opt, "brute-force")) {
    double dev = 0.0;
    RngStream sub = rng.child(3);
    for (int t = 1; t <= opt.t_max_brute; ++t) {
      RngStream trng = sub.child(t);
      const AscentResult res = brute_force_optimal_attack(t, opt.brute_restarts, trng);
      dev = std::max(dev, std::abs(res.best_success -
                                   (0.5 + 0.5 * std::cos(kPi / (t + 2)))));
    }
    add_check(out,
              {"brute-force",
               {{"t_max", opt.t_max_brute}, {"restarts", opt.brute_restarts}},
               dev,
               1e-6,
               dev <= 1e-6});
  }

  if (wanted(opt, "discrete-continuous")) {
    double dev = 0.0;
    RngStream sub = rng.child(4);
    for (int k = 0; k < 100; ++k) {
      const int r = 1 + static_cast<int>(sub.below(4));
      const int d = 1 + static_cast<int>(sub.below(2 * r));  // d <= 2r
      const int n = 1 + static_cast<int>(sub.below(5));
      dev = std::max(dev, discrete_continuous_check(r, PolySpec::random(d, n, sub)));
    }
    add_check(out,
              {"discrete-continuous",
               {{"specs", 100}, {"r_max", 4}},
               dev,
               1e-10,
               dev <= 1e-10});
  }

  if (wanted(opt, "aliasing-witness")) {
    // Inverted check: degree 2r+1 must visibly break the equivalence.
    double min_dev = 1e300;
    for (int r = 1; r <= 4; ++r)
      min_dev = std::min(min_dev, discrete_continuous_check(r, PolySpec::aliasing_witness(r)));
    add_check(out,
              {"aliasing-witness",
               {{"r_max", 4}, {"expect", "deviation above tolerance"}},
               min_dev,
               0.01,
               min_dev > 0.01});
  }

  if (wanted(opt, "product-rule-analytic")) {
    double dev = 0.0;
    for (int t = 1; t <= 4; ++t)
      for (int s = 1; s <= 8; ++s)
        dev = std::max(dev, product_rule_check(t, s, 0, opt.seed).analytic_deviation);
    add_check(out,
              {"product-rule-analytic",
               {{"t_max", 4}, {"s_max", 8}},
               dev,
               1e-9,
               dev <= 1e-9});
  }

  if (wanted(opt, "product-rule-mc")) {
    // Deviation reported in units of four binomial standard errors.
    double worst = 0.0;
    const int pairs[][2] = {{1, 2}, {2, 3}};
    for (const auto& p : pairs) {
      const ProductRuleReport rep =
          product_rule_check(p[0], p[1], opt.product_trials, opt.seed);
      const double four_sigma = 4.0 * rep.mc_stderr;
      worst = std::max(worst, std::abs(rep.mc_acceptance - rep.alpha_pow_s) / four_sigma);
    }
    add_check(out,
              {"product-rule-mc",
               {{"trials", opt.product_trials}, {"pairs", {{1, 2}, {2, 3}}}},
               worst,
               1.0,
               worst <= 1.0});
  }

  return out;
}

}  // namespace qpki::oracle
