#include "qpki/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpki/adversary.hpp"
#include "qpki/bounds.hpp"
#include "qpki/fmt.hpp"
#include "qpki/mc.hpp"
#include "qpki/oracle.hpp"
#include "qpki/protocol.hpp"
#include "qpki/rng.hpp"

#ifndef QPKI_VERSION_STRING
#define QPKI_VERSION_STRING "qpki 0.0.0+unknown"
#endif

namespace qpki::cli {

namespace {

using nlohmann::json;

// Desk limits. The reduced-basis matrices are 2(t+1)-dimensional and the
// dense routines are O(dim^3), so t is capped where exact linear algebra is
// involved; r and s are capped where per-trial work scales with them.
constexpr int kMaxR = 64;
constexpr int kMaxS = 4096;
constexpr int kMaxT = 16;
constexpr std::uint64_t kMaxTrials = 100000000;

// Stream-id bases keeping every command's trial streams disjoint.
constexpr std::uint64_t kHonestBase = 0x686f6e657374ULL;
constexpr std::uint64_t kAttackBase = 0x61747461636bULL;
constexpr std::uint64_t kSweepBase = 0x7377656570ULL;
constexpr std::uint64_t kKeygenStream = 0x6b657967656eULL;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json base_report(const char* command, std::uint64_t seed) {
  return json{{"command", command}, {"version", QPKI_VERSION_STRING}, {"seed", seed}};
}

// Writes `text` to the --out path when given, otherwise to the stream, with
// a trailing newline either way.
void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  std::string body = text;
  if (body.empty() || body.back() != '\n') body.push_back('\n');
  if (out_path.empty()) {
    out << body;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << body;
  if (!f) throw std::runtime_error("write failed: " + out_path);
}

adversary::AttackStrategy make_strategy(const std::string& name, int t) {
  if (name == "random") return adversary::AttackStrategy::random_guess();
  if (name == "phase-est") return adversary::AttackStrategy::phase_estimation(t);
  if (name == "optimal") return adversary::AttackStrategy::optimal_individual(t);
  throw std::invalid_argument("unknown strategy: " + name);
}

struct KeygenConfig {
  int r = 1;
  int s = 1;
  std::uint64_t seed = 42;
  std::string out_prefix;
  bool force = false;
};

struct SimulateConfig {
  std::string mode = "honest";
  int r = 1;
  int s = 1;
  int t_prime = 0;
  std::string strategy = "optimal";
  std::uint64_t trials = 10000;
  std::uint64_t seed = 42;
  std::string format = "json";
  std::string out_path;
};

struct BoundConfig {
  int r = 1;
  int s = 0;  // 0 means not set
  double epsilon = 0.0;
  bool has_epsilon = false;
  int t_prime = 0;
  std::string format = "text";
  std::string out_path;
};

struct VerifyConfig {
  oracle::VerifyOptions options;
  std::string format = "text";
  std::string out_path;
};

struct SweepConfig {
  int r = 1;
  std::vector<int> s_list;
  std::vector<int> t_list;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 42;
  std::string format = "csv";
  std::string out_path;
};

int cmd_keygen(const KeygenConfig& cfg, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const std::string priv_path = cfg.out_prefix + ".private.json";
  const std::string pub_path = cfg.out_prefix + ".public.json";
  if (!cfg.force && (fs::exists(priv_path) || fs::exists(pub_path))) {
    err << "error: " << priv_path << " or " << pub_path
        << " already exists (use --force to overwrite)\n";
    return 2;
  }
  RngStream rng(cfg.seed, kKeygenStream);
  protocol::KeyIssuer issuer(protocol::Params{cfg.s, cfg.r}, rng);
  const json priv = protocol::private_key_json(issuer, cfg.seed);
  protocol::PublicKeyCopy copy = issuer.issue_copy();
  const json pub = protocol::public_copy_json(issuer, copy);
  {
    std::ofstream f(priv_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + priv_path);
    f << priv.dump(2) << '\n';
  }
  fs::permissions(priv_path, fs::perms::owner_read | fs::perms::owner_write,
                  fs::perm_options::replace);
  {
    std::ofstream f(pub_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + pub_path);
    f << pub.dump(2) << '\n';
  }
  out << "wrote " << priv_path << " (mode 600) and " << pub_path << "\n";
  return 0;
}

int cmd_simulate(const SimulateConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const bool honest = cfg.mode == "honest";
  const int t = cfg.r + cfg.t_prime;
  if (!honest && cfg.t_prime > cfg.r - 1) {
    err << "error: --t-prime must be at most r-1\n";
    return 2;
  }
  if (!honest && cfg.strategy != "random" && t > kMaxT) {
    err << "error: r + t-prime = " << t << " exceeds the exact-simulation cap of "
        << kMaxT << "\n";
    return 2;
  }
  const protocol::Params params{cfg.s, cfg.r};
  protocol::validate_params(params);

  std::uint64_t accepted = 0;
  json config{{"mode", cfg.mode}, {"r", cfg.r}, {"s", cfg.s}, {"trials", cfg.trials}};
  json results;
  if (honest) {
    accepted = mc::count_successes(cfg.trials, cfg.seed, kHonestBase,
                                   [&](RngStream& rng) {
                                     protocol::KeyIssuer issuer(params, rng);
                                     protocol::PublicKeyCopy copy = issuer.issue_copy();
                                     return protocol::identify(issuer, copy, rng).accept;
                                   });
    results["expected_acceptance"] = 1.0;
    results["rejected"] = cfg.trials - accepted;
  } else {
    const adversary::AttackStrategy strategy = make_strategy(cfg.strategy, t);
    config["t_prime"] = cfg.t_prime;
    config["t"] = t;
    config["strategy"] = strategy.descriptor();
    // Each trial books the attacker's full resource budget against a fresh
    // key: t' copies grabbed from the issuer, all r prover runs burned as
    // black-box queries, then one impersonation against a real verifier.
    accepted = mc::count_successes(
        cfg.trials, cfg.seed, kAttackBase, [&](RngStream& rng) {
          protocol::KeyIssuer issuer(params, rng);
          adversary::BlackBoxLedger ledger(cfg.r, cfg.t_prime);
          for (int k = 0; k < cfg.t_prime; ++k) issuer.issue_copy();
          for (int k = 0; k < cfg.r; ++k)
            adversary::extract_black_boxes(issuer, ledger);
          protocol::PublicKeyCopy copy = issuer.issue_copy();
          return adversary::impersonate(strategy, ledger, issuer, copy, rng).accept;
        });
    const bounds::BoundReport bound =
        bounds::make_bound_report(cfg.r, cfg.s, cfg.t_prime);
    results["first_attempt_bound"] = bound.per_attempt.front();
    results["p_break_bound"] = bound.p_break;
    if (cfg.strategy == "optimal")
      results["closed_form_acceptance"] =
          std::pow(0.5 + 0.5 * std::cos(3.14159265358979323846 / (t + 2)), cfg.s);
    else if (cfg.strategy == "random")
      results["closed_form_acceptance"] = std::pow(0.5, cfg.s);
  }
  const double acceptance = static_cast<double>(accepted) / cfg.trials;
  results["accepted"] = accepted;
  results["acceptance"] = acceptance;
  results["std_error"] = mc::binomial_stderr(acceptance, cfg.trials);

  json rep = base_report("simulate", cfg.seed);
  rep["config"] = config;
  rep["results"] = results;
  rep["wall_clock_seconds"] = seconds_since(t0);

  if (cfg.format == "json") {
    emit(rep.dump(2), cfg.out_path, out);
  } else if (cfg.format == "csv") {
    std::ostringstream csv;
    csv << "mode,strategy,r,s,t_prime,t,trials,accepted,acceptance,std_error\n"
        << csv_field(cfg.mode) << ',' << csv_field(honest ? "" : cfg.strategy) << ','
        << cfg.r << ',' << cfg.s << ',' << (honest ? 0 : cfg.t_prime) << ','
        << (honest ? 0 : t) << ',' << cfg.trials << ',' << accepted << ','
        << fmt_double(acceptance) << ','
        << fmt_double(results["std_error"].get<double>());
    emit(csv.str(), cfg.out_path, out);
  } else {
    std::ostringstream text;
    text << "simulate " << cfg.mode << ": r=" << cfg.r << " s=" << cfg.s;
    if (!honest)
      text << " t_prime=" << cfg.t_prime << " t=" << t << " strategy=" << cfg.strategy;
    text << "\n  trials     " << cfg.trials << "\n  accepted   " << accepted
         << "\n  acceptance " << fmt_double(acceptance) << " +- "
         << fmt_double(results["std_error"].get<double>()) << "\n";
    for (const char* key :
         {"expected_acceptance", "closed_form_acceptance", "first_attempt_bound",
          "p_break_bound"})
      if (results.contains(key))
        text << "  " << key << " " << fmt_double(results[key].get<double>()) << "\n";
    emit(text.str(), cfg.out_path, out);
  }
  // An honest run that rejects even once means the simulator is broken.
  return honest && accepted != cfg.trials ? 1 : 0;
}

int cmd_bound(const BoundConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.t_prime > cfg.r - 1) {
    err << "error: --t-prime must be at most r-1\n";
    return 2;
  }
  const bounds::BoundReport rep =
      cfg.has_epsilon ? bounds::make_bound_report_epsilon(cfg.r, cfg.epsilon, cfg.t_prime)
                      : bounds::make_bound_report(cfg.r, cfg.s, cfg.t_prime);
  if (cfg.format == "json") {
    json j = bounds::bound_report_json(rep);
    j["command"] = "bound";
    j["version"] = QPKI_VERSION_STRING;
    emit(j.dump(2), cfg.out_path, out);
  } else {
    emit(bounds::bound_report_text(rep), cfg.out_path, out);
  }
  return 0;
}

int cmd_verify(const VerifyConfig& cfg, std::ostream& out, std::ostream&) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<oracle::CheckResult> checks = oracle::run_verification_suite(cfg.options);
  bool all_pass = true;
  for (const oracle::CheckResult& c : checks) all_pass = all_pass && c.pass;
  if (cfg.format == "json") {
    json rep = base_report("verify", cfg.options.seed);
    rep["options"] = {{"t_max_matrix", cfg.options.t_max_matrix},
                      {"t_max_brute", cfg.options.t_max_brute},
                      {"brute_restarts", cfg.options.brute_restarts},
                      {"product_trials", cfg.options.product_trials},
                      {"only", cfg.options.only},
                      {"inject_povm_fault", cfg.options.inject_povm_fault}};
    json arr = json::array();
    for (const oracle::CheckResult& c : checks)
      arr.push_back({{"name", c.name},
                     {"params", c.params},
                     {"deviation", c.deviation},
                     {"tolerance", c.tolerance},
                     {"pass", c.pass}});
    rep["checks"] = arr;
    rep["all_pass"] = all_pass;
    rep["scope_note"] = oracle::kScopeNote;
    rep["wall_clock_seconds"] = seconds_since(t0);
    emit(rep.dump(2), cfg.out_path, out);
  } else {
    std::ostringstream text;
    for (const oracle::CheckResult& c : checks)
      text << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
           << "  deviation=" << fmt_double(c.deviation)
           << " tolerance=" << fmt_double(c.tolerance) << "  " << c.params.dump()
           << "\n";
    text << (all_pass ? "all checks passed" : "CHECKS FAILED") << " ("
         << checks.size() << " run, " << fmt_double(seconds_since(t0)) << "s)\n\n"
         << oracle::kScopeNote << "\n";
    emit(text.str(), cfg.out_path, out);
  }
  return all_pass ? 0 : 1;
}

int cmd_sweep(const SweepConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int t : cfg.t_list)
    if (t < cfg.r || t > 2 * cfg.r - 1 || t > kMaxT) {
      err << "error: sweep t values must lie in [r, 2r-1] and at most " << kMaxT
          << " (got t=" << t << " with r=" << cfg.r << ")\n";
      return 2;
    }
  for (int s : cfg.s_list)
    if (s < 1 || s > kMaxS) {
      err << "error: sweep s values must lie in [1, " << kMaxS << "]\n";
      return 2;
    }

  struct Row {
    int r, s, t;
    double alpha, alpha_pow_s, p_break_bound, mc_acceptance, mc_std_error;
  };
  std::vector<Row> rows;
  std::uint64_t row_idx = 0;
  for (int t : cfg.t_list) {
    const adversary::AttackStrategy strategy =
        adversary::AttackStrategy::optimal_individual(t);
    const double alpha = 0.5 + 0.5 * std::cos(3.14159265358979323846 / (t + 2));
    for (int s : cfg.s_list) {
      const int r = cfg.r;
      // Per-iteration attacks with a fresh uniform sub-key value each round;
      // acceptance needs all s rounds right.
      const std::uint64_t hits = mc::count_successes(
          cfg.trials, cfg.seed, mix64(kSweepBase, row_idx), [&](RngStream& rng) {
            for (int j = 0; j < s; ++j) {
              const int x = 1 + static_cast<int>(rng.below(2 * r + 1));
              if (!strategy.run_iteration(x, r, rng).success) return false;
            }
            return true;
          });
      const double acc = static_cast<double>(hits) / cfg.trials;
      rows.push_back(Row{r, s, t, alpha, std::pow(alpha, s),
                         bounds::break_probability_bound(r, s).value, acc,
                         mc::binomial_stderr(acc, cfg.trials)});
      ++row_idx;
    }
  }

  if (cfg.format == "json") {
    json rep = base_report("sweep", cfg.seed);
    rep["config"] = {{"r", cfg.r},
                     {"s_list", cfg.s_list},
                     {"t_list", cfg.t_list},
                     {"trials", cfg.trials}};
    json arr = json::array();
    for (const Row& row : rows)
      arr.push_back({{"r", row.r},
                     {"s", row.s},
                     {"t", row.t},
                     {"alpha", row.alpha},
                     {"alpha_pow_s", row.alpha_pow_s},
                     {"p_break_bound", row.p_break_bound},
                     {"mc_acceptance", row.mc_acceptance},
                     {"mc_std_error", row.mc_std_error}});
    rep["rows"] = arr;
    rep["wall_clock_seconds"] = seconds_since(t0);
    emit(rep.dump(2), cfg.out_path, out);
  } else {
    std::ostringstream csv;
    csv << "r,s,t,alpha,alpha_pow_s,p_break_bound,mc_acceptance,mc_std_error\n";
    for (const Row& row : rows)
      csv << row.r << ',' << row.s << ',' << row.t << ',' << fmt_double(row.alpha)
          << ',' << fmt_double(row.alpha_pow_s) << ','
          << fmt_double(row.p_break_bound) << ',' << fmt_double(row.mc_acceptance)
          << ',' << fmt_double(row.mc_std_error) << '\n';
    emit(csv.str(), cfg.out_path, out);
  }
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"simulator and verifier for a bounded-reuse quantum "
               "public-key identification scheme"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(QPKI_VERSION_STRING));

  KeygenConfig kg;
  CLI::App* keygen = app.add_subcommand(
      "keygen", "generate a key pair and write it to <prefix>.{private,public}.json");
  keygen->add_option("--r", kg.r, "reusability budget")
      ->required()
      ->check(CLI::Range(1, kMaxR));
  keygen->add_option("--s", kg.s, "sub-keys per key")
      ->required()
      ->check(CLI::Range(1, kMaxS));
  keygen->add_option("--seed", kg.seed, "PRNG seed")->envname("QPK_SEED");
  keygen->add_option("--out", kg.out_prefix, "output path prefix")->required();
  keygen->add_flag("--force", kg.force, "overwrite existing key files");

  auto add_simulate_options = [&](CLI::App* cmd, SimulateConfig& cfg, bool with_mode) {
    if (with_mode)
      cmd->add_option("--mode", cfg.mode, "honest or attack")
          ->required()
          ->check(CLI::IsMember({"honest", "attack"}));
    cmd->add_option("--r", cfg.r, "reusability budget")
        ->required()
        ->check(CLI::Range(1, kMaxR));
    cmd->add_option("--s", cfg.s, "sub-keys per key")
        ->required()
        ->check(CLI::Range(1, kMaxS));
    cmd->add_option("--t-prime", cfg.t_prime,
                    "public-key copies the attacker captures (attack mode)")
        ->check(CLI::Range(0, kMaxR - 1));
    cmd->add_option("--strategy", cfg.strategy, "attack strategy (attack mode)")
        ->check(CLI::IsMember({"random", "phase-est", "optimal"}));
    cmd->add_option("--trials", cfg.trials, "Monte Carlo trials")
        ->check(CLI::Range(std::uint64_t{1}, kMaxTrials));
    cmd->add_option("--seed", cfg.seed, "PRNG seed")->envname("QPK_SEED");
    cmd->add_option("--format", cfg.format, "json, csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    cmd->add_option("--out", cfg.out_path, "write the report here instead of stdout");
  };
  SimulateConfig sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo protocol runs, honest or attacked");
  add_simulate_options(simulate, sim, true);
  SimulateConfig atk;
  atk.mode = "attack";
  CLI::App* attack =
      app.add_subcommand("attack", "shorthand for: simulate --mode attack");
  add_simulate_options(attack, atk, false);

  BoundConfig bd;
  CLI::App* bound =
      app.add_subcommand("bound", "analytic security bounds for given parameters");
  bound->add_option("--r", bd.r, "reusability budget")
      ->required()
      ->check(CLI::Range(1, kMaxR));
  CLI::Option* bound_s =
      bound->add_option("--s", bd.s, "sub-keys per key")->check(CLI::Range(1, kMaxS));
  CLI::Option* bound_eps =
      bound->add_option("--epsilon", bd.epsilon, "target break probability")
          ->check(CLI::Range(1e-12, 0.5));
  bound_s->excludes(bound_eps);
  bound->add_option("--t-prime", bd.t_prime, "attacker's captured copies")
      ->check(CLI::Range(0, kMaxR - 1));
  bound->add_option("--format", bd.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  bound->add_option("--out", bd.out_path, "write the report here instead of stdout");

  VerifyConfig vf;
  CLI::App* verify = app.add_subcommand(
      "verify", "cross-check the attack analysis through independent numerical routes");
  verify->add_option("--only", vf.options.only, "run a single named check");
  verify->add_option("--t-max", vf.options.t_max_matrix,
                     "box-count ceiling for the matrix-structure checks")
      ->check(CLI::Range(1, kMaxT));
  verify->add_option("--t-max-brute", vf.options.t_max_brute,
                     "box-count ceiling for the gradient-ascent search")
      ->check(CLI::Range(1, 8));
  verify->add_option("--restarts", vf.options.brute_restarts,
                     "random restarts per box count")
      ->check(CLI::Range(1, 10000));
  verify->add_option("--trials", vf.options.product_trials,
                     "Monte Carlo trials for the product-rule check")
      ->check(CLI::Range(std::uint64_t{1}, kMaxTrials));
  verify->add_option("--seed", vf.options.seed, "PRNG seed")->envname("QPK_SEED");
  verify->add_flag("--inject-povm-fault", vf.options.inject_povm_fault,
                   "corrupt one measurement element to prove the checks can fail");
  verify->add_option("--format", vf.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  verify->add_option("--out", vf.out_path, "write the report here instead of stdout");

  SweepConfig sw;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "tabulate attack acceptance against the analytic bounds");
  sweep->add_option("--r", sw.r, "reusability budget")
      ->required()
      ->check(CLI::Range(1, kMaxR));
  sweep->add_option("--s-list", sw.s_list, "comma-separated s values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--t-list", sw.t_list, "comma-separated box counts, each in [r, 2r-1]")
      ->required()
      ->delimiter(',');
  sweep->add_option("--trials", sw.trials, "Monte Carlo trials per cell")
      ->check(CLI::Range(std::uint64_t{1}, kMaxTrials));
  sweep->add_option("--seed", sw.seed, "PRNG seed")->envname("QPK_SEED");
  sweep->add_option("--format", sw.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--out", sw.out_path, "write the table here instead of stdout");

  std::vector<const char*> argv;
  argv.push_back("qpki");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(keygen)) return cmd_keygen(kg, out, err);
    if (app.got_subcommand(simulate)) return cmd_simulate(sim, out, err);
    if (app.got_subcommand(attack)) return cmd_simulate(atk, out, err);
    if (app.got_subcommand(bound)) {
      bd.has_epsilon = bound_eps->count() > 0;
      if (!bd.has_epsilon && bound_s->count() == 0) {
        err << "error: bound requires exactly one of --s or --epsilon\n";
        return 2;
      }
      return cmd_bound(bd, out, err);
    }
    if (app.got_subcommand(verify)) return cmd_verify(vf, out, err);
    if (app.got_subcommand(sweep)) return cmd_sweep(sw, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no command given\n";
  return 2;
}

}  // namespace qpki::cli
