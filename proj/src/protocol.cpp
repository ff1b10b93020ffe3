#include "qpki/protocol.hpp"

#include <cmath>

namespace qpki::protocol {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

const qla::Povm& pm_basis_povm() {
  // {|+><+|, |-><-|} with outcome 0 mapped to reply bit 0.
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
}  // namespace

void validate_params(const Params& p) {
  if (p.s < 1) throw std::invalid_argument("Params: s must be >= 1");
  if (p.r < 1) throw std::invalid_argument("Params: r must be >= 1");
}

double phase_of(int x, int r) {
  if (r < 1) throw std::invalid_argument("phase_of: r must be >= 1");
  if (x < 1 || x > 2 * r + 1)
    throw std::invalid_argument("phase_of: x out of range [1, 2r+1]");
  return kTwoPi * static_cast<double>(x) / static_cast<double>(2 * r + 1);
}

bool PublicKeyCopy::fresh() const {
  for (bool c : consumed)
    if (c) return false;
  return true;
}

KeyIssuer::KeyIssuer(const Params& p, RngStream& rng) : p_(p) {
  validate_params(p);
  key_.x.resize(p.s);
  for (int j = 0; j < p.s; ++j)
    key_.x[j] = 1 + static_cast<int>(rng.below(2 * static_cast<std::uint64_t>(p.r) + 1));
}

PublicKeyCopy KeyIssuer::issue_copy() {
  if (copies_issued_ >= p_.r)
    throw CopyLimitExceeded("issue_copy: all " + std::to_string(p_.r) +
                            " public-key copies already issued");
  PublicKeyCopy copy;
  copy.copy_id = copies_issued_++;
  copy.qubits.reserve(p_.s);
  copy.consumed.assign(p_.s, false);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < p_.s; ++j) {
    qla::CVec q(2);
    q[0] = inv_sqrt2;
    q[1] = std::polar(inv_sqrt2, phase_of(key_.x[j], p_.r));
    copy.qubits.push_back(q);
  }
  return copy;
}

void KeyIssuer::consume_prover_run() {
  if (prover_runs_used_ >= p_.r)
    throw UsageExhausted("consume_prover_run: prover already ran " +
                         std::to_string(p_.r) + " times");
  ++prover_runs_used_;
}

IterationRecord kernel_run(const KeyIssuer& issuer, PublicKeyCopy& copy, int j,
                           RngStream& rng) {
  const Params& p = issuer.params();
  if (j < 0 || j >= p.s) throw std::invalid_argument("kernel_run: j out of range");
  if (static_cast<std::size_t>(j) >= copy.consumed.size() ||
      copy.qubits.size() != copy.consumed.size())
    throw std::invalid_argument("kernel_run: malformed copy");
  if (copy.consumed[j])
    throw ConsumedCopy("kernel_run: qubit " + std::to_string(j) +
                       " of copy " + std::to_string(copy.copy_id) +
                       " already consumed");
  copy.consumed[j] = true;

  const int b = rng.bit();
  qla::CVec state = copy.qubits[j];
  // Verifier hides b as a sign on the |1> amplitude (a Z application),
  // exact by construction.
  if (b) state[1] = -state[1];
  // Prover peels the key phase off and measures in the +/- basis.
  state = qla::phase_gate(-phase_of(issuer.key().x[j], p.r)) * state;
  const int reply = static_cast<int>(qla::measure_povm(state, pm_basis_povm(), rng));
  return IterationRecord{j, b, reply, reply == b};
}

Transcript identify(KeyIssuer& issuer, PublicKeyCopy& copy, RngStream& rng) {
  if (!copy.fresh())
    throw ConsumedCopy("identify: verification requires a fresh copy");
  issuer.consume_prover_run();
  Transcript t;
  t.accept = true;
  const int s = issuer.params().s;
  t.iterations.reserve(s);
  for (int j = 0; j < s; ++j) {
    t.iterations.push_back(kernel_run(issuer, copy, j, rng));
    t.accept = t.accept && t.iterations.back().pass;
  }
  return t;
}

nlohmann::json transcript_json(const Transcript& t) {
  nlohmann::json iterations = nlohmann::json::array();
  for (const IterationRecord& it : t.iterations)
    iterations.push_back({{"j", it.j},
                          {"b", it.bob_bit},
                          {"b_prime", it.reply_bit},
                          {"pass", it.pass}});
  return {{"iterations", iterations}, {"verdict", t.accept ? "accept" : "reject"}};
}

nlohmann::json private_key_json(const KeyIssuer& issuer, std::uint64_t seed) {
  return {{"r", issuer.params().r},
          {"s", issuer.params().s},
          {"x", issuer.key().x},
          {"seed", seed}};
}

nlohmann::json public_copy_json(const KeyIssuer& issuer, const PublicKeyCopy& copy) {
  nlohmann::json qubits = nlohmann::json::array();
  for (const qla::CVec& q : copy.qubits)
    qubits.push_back({{q[0].real(), q[0].imag()}, {q[1].real(), q[1].imag()}});
  return {{"r", issuer.params().r},
          {"s", issuer.params().s},
          {"copy_id", copy.copy_id},
          {"qubits", qubits}};
}

}  // namespace qpki::protocol
