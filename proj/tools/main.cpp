// Command-line front end: single-point rate computations, threshold
// finding, figure-reproducing sweeps, and self-verification.
//
// Exit codes: 0 success, 1 verification failure, 2 infeasible rates,
// 64 usage error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdqkd/asymptotic.hpp"
#include "hdqkd/figures.hpp"
#include "hdqkd/finite.hpp"
#include "hdqkd/verify.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitUsage = 64;

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

struct OutputOptions {
  bool as_json = false;
  std::string out_path;
};

void emit(const OutputOptions& out, const json& record, const std::string& human) {
  if (!out.out_path.empty()) {
    std::ofstream os(out.out_path);
    if (!os) throw std::runtime_error("cannot write " + out.out_path);
    os << record.dump(2) << "\n";
  }
  if (out.as_json)
    std::cout << record.dump(2) << "\n";
  else
    std::cout << human;
}

json base_record(const std::string& command, const json& inputs) {
  return json{{"tool", hdqkd::kToolName},
              {"version", hdqkd::kVersion},
              {"command", command},
              {"inputs", inputs}};
}

// Values from --config FILE are injected as trailing arguments for every
// option not already present on the command line, so explicit flags win.
std::vector<std::string> apply_config(const std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config_path = args[i + 1];
  if (config_path.empty()) return args;

  std::ifstream is(config_path);
  if (!is) throw CLI::FileError("cannot read config file: " + config_path);
  json cfg = json::parse(is);
  if (!cfg.is_object()) throw CLI::FileError("config file must hold a JSON object");

  std::vector<std::string> merged = args;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
    if (present) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) merged.push_back(flag);
    } else {
      merged.push_back(flag);
      merged.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return merged;
}

std::vector<double> parse_rate_list(const std::string& csv) {
  std::vector<double> rates;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    rates.push_back(std::stod(item));
  }
  return rates;
}

json split_to_json(const hdqkd::SecuritySplit& s) {
  return json{{"log2_eps", s.log2_eps},
              {"log2_eps_ec", s.log2_eps_ec},
              {"log2_eps_pa", s.log2_eps_pa},
              {"log2_eps_tot", s.log2_eps_tot},
              {"eps", s.eps()},
              {"eps_ec", s.eps_ec()},
              {"eps_pa", s.eps_pa()}};
}

int run(std::vector<std::string> args) {
  CLI::App app{"Asymptotic and finite-size secret-key rates for "
               "entanglement-based high-dimensional QKD with multiple "
               "mutually unbiased bases"};
  app.set_version_flag("--version", std::string(hdqkd::kToolName) + " v" + hdqkd::kVersion);
  app.require_subcommand(1);

  OutputOptions out;
  app.add_flag("--json", out.as_json, "print the full run record as JSON");
  app.add_option("--out", out.out_path, "also write the JSON run record to this file");
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file with default option values (explicit flags win)");

  const auto started = std::chrono::steady_clock::now();
  const auto wall_ms = [&] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - started)
        .count();
  };

  // -- asymptotic ------------------------------------------------------
  auto* cmd_asym = app.add_subcommand("asymptotic", "asymptotic key rate for (d, m)");
  int a_d = 5, a_m = 2;
  double a_q = -1, a_qx = -1, a_qz = -1;
  std::string a_rates;
  bool a_nonprime = false;
  cmd_asym->add_option("--d", a_d, "Hilbert space dimension")->required();
  cmd_asym->add_option("--m", a_m, "number of measured bases (2..d+1)")->required();
  cmd_asym->add_option("--q", a_q, "symmetric error rate for all m bases");
  cmd_asym->add_option("--qx", a_qx, "X-basis error rate (m=2)");
  cmd_asym->add_option("--qz", a_qz, "Z-basis error rate (m=2)");
  cmd_asym->add_option("--rates", a_rates, "comma list of m rates, Q_Z first");
  cmd_asym->add_flag("--allow-nonprime", a_nonprime,
                     "compute outside the guaranteed-MUB regime (m > 3, non-prime d)");
  cmd_asym->callback([&] {
    std::vector<double> rates;
    if (!a_rates.empty()) {
      rates = parse_rate_list(a_rates);
    } else if (a_q >= 0) {
      rates.assign(a_m, a_q);
    } else if (a_qx >= 0 && a_qz >= 0) {
      if (a_m != 2)
        throw CLI::ValidationError("--qx/--qz", "asymmetric pair form requires --m 2");
      rates = {a_qz, a_qx};
    } else {
      throw CLI::RequiredError("one of --q, --qx/--qz, or --rates");
    }
    const hdqkd::ErrorRateSet observed(a_d, rates);
    const hdqkd::AsymptoticSolution sol = hdqkd::solve_eta(observed, a_nonprime);
    json rec = base_record("asymptotic",
                           {{"d", a_d}, {"m", a_m}, {"rates", rates},
                            {"allow_nonprime", a_nonprime}});
    rec["results"] = {{"rate", sol.rate},
                      {"rate_clamped", std::max(0.0, sol.rate)},
                      {"q", sol.q},
                      {"v", sol.v},
                      {"eta", sol.eta},
                      {"lambda00", sol.lambda00},
                      {"lambdaZ", sol.lambdaZ},
                      {"lambdaK", sol.lambdaK}};
    rec["wall_time_ms"] = wall_ms();
    std::ostringstream os;
    os << "rate          = " << fmt12(sol.rate) << " bit per sifted symbol\n"
       << "rate_clamped  = " << fmt12(std::max(0.0, sol.rate)) << "\n"
       << "q             = " << fmt12(sol.q) << "\n"
       << "v             = " << fmt12(sol.v) << "\n"
       << "eta           = " << fmt12(sol.eta) << "\n"
       << "lambda00      = " << fmt12(sol.lambda00) << "\n"
       << "lambdaZ       = " << fmt12(sol.lambdaZ) << "\n";
    os << "lambdaK       = [";
    for (std::size_t i = 0; i < sol.lambdaK.size(); ++i)
      os << (i ? ", " : "") << fmt12(sol.lambdaK[i]);
    os << "]\n";
    emit(out, rec, os.str());
  });

  // -- threshold -------------------------------------------------------
  auto* cmd_thresh = app.add_subcommand("threshold", "maximum tolerable symmetric error rate");
  int t_d = 2, t_m = 2;
  bool t_nonprime = false;
  cmd_thresh->add_option("--d", t_d, "Hilbert space dimension")->required();
  cmd_thresh->add_option("--m", t_m, "number of measured bases")->required();
  cmd_thresh->add_flag("--allow-nonprime", t_nonprime, "see asymptotic --allow-nonprime");
  cmd_thresh->callback([&] {
    const double qmax = hdqkd::max_tolerable_q(t_d, t_m, t_nonprime);
    json rec = base_record("threshold", {{"d", t_d}, {"m", t_m},
                                         {"allow_nonprime", t_nonprime}});
    rec["results"] = {{"q_max", qmax}};
    rec["wall_time_ms"] = wall_ms();
    char line[64];
    std::snprintf(line, sizeof(line), "Q_max = %.6f\n", qmax);
    emit(out, rec, line);
  });

  // -- finite ----------------------------------------------------------
  auto* cmd_finite = app.add_subcommand("finite", "optimized finite-size key rate");
  double f_n = 1e7, f_q = 0.05, f_eps = 1e-10, f_c = -1, f_f = 1.0;
  int f_d = 5, f_m = 2;
  std::string f_bound = "aep", f_attack = "collective", f_mode = "derive";
  bool f_nonprime = false;
  cmd_finite->add_option("--N", f_n, "total number of rounds")->required();
  cmd_finite->add_option("--d", f_d, "Hilbert space dimension")->required();
  cmd_finite->add_option("--m", f_m, "number of measured bases")->required();
  cmd_finite->add_option("--q", f_q, "tolerated error rate")->required();
  cmd_finite->add_option("--eps-tot", f_eps,
                         "security budget (for --attack coherent with "
                         "--eps-mode derive this is the coherent target)");
  cmd_finite->add_option("--bound", f_bound, "eur (m=2 only) or aep")
      ->check(CLI::IsMember({"eur", "aep"}));
  cmd_finite->add_option("--attack", f_attack, "collective or coherent")
      ->check(CLI::IsMember({"collective", "coherent"}));
  cmd_finite->add_option("--eps-mode", f_mode,
                         "coherent accounting: derive eps_tot from the "
                         "coherent target, or use eps-tot as-is (fixed)")
      ->check(CLI::IsMember({"derive", "fixed"}));
  cmd_finite->add_option("--C", f_c, "measurement incompatibility in bits (default log2 d)");
  cmd_finite->add_option("--f", f_f, "error-correction inefficiency factor");
  cmd_finite->add_flag("--allow-nonprime", f_nonprime, "see asymptotic --allow-nonprime");
  cmd_finite->callback([&] {
    if (!(f_eps > 0)) throw CLI::ValidationError("--eps-tot", "must be positive");
    const hdqkd::BoundType bound =
        f_bound == "eur" ? hdqkd::BoundType::eur : hdqkd::BoundType::aep;
    const hdqkd::AttackModel attack = f_attack == "collective"
                                          ? hdqkd::AttackModel::collective
                                          : hdqkd::AttackModel::coherent;
    const hdqkd::EpsMode mode =
        f_mode == "derive" ? hdqkd::EpsMode::derive : hdqkd::EpsMode::fixed;
    hdqkd::RateResult r;
    try {
      r = hdqkd::optimize_rate(f_n, f_d, f_m, f_q, std::log2(f_eps), bound,
                               attack, mode, f_c, f_f, f_nonprime);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("finite", e.what());
    }
    json rec = base_record(
        "finite", {{"N", f_n}, {"d", f_d}, {"m", f_m}, {"q_tol", f_q},
                   {"eps_tot", f_eps}, {"bound", f_bound}, {"attack", f_attack},
                   {"eps_mode", f_mode},
                   {"C", f_c < 0 ? json("log2(d)") : json(f_c)},
                   {"f", f_f}, {"allow_nonprime", f_nonprime}});
    rec["results"] = {{"rate", r.rate},
                      {"key_length", r.key_length},
                      {"optimal_k", r.test_rounds},
                      {"feasible", r.feasible},
                      {"bound", to_string(r.bound)},
                      {"attack", to_string(r.attack)},
                      {"split", split_to_json(r.split)}};
    if (attack == hdqkd::AttackModel::coherent)
      rec["results"]["log2_eps_coh"] = r.log2_eps_coh;
    rec["wall_time_ms"] = wall_ms();
    std::ostringstream os;
    os << "rate        = " << fmt12(r.rate) << " secret bit per round\n"
       << "key_length  = " << fmt12(r.key_length) << " bit\n"
       << "optimal_k   = " << fmt12(r.test_rounds) << "\n"
       << "feasible    = " << (r.feasible ? "yes" : "no") << "\n"
       << "split       = log2(eps, eps_EC, eps_PA) = (" << fmt12(r.split.log2_eps)
       << ", " << fmt12(r.split.log2_eps_ec) << ", " << fmt12(r.split.log2_eps_pa)
       << ")\n";
    if (attack == hdqkd::AttackModel::coherent)
      os << "log2_eps_coh = " << fmt12(r.log2_eps_coh) << "\n";
    emit(out, rec, os.str());
  });

  // -- figure ----------------------------------------------------------
  auto* cmd_fig = app.add_subcommand("figure", "write figure-reproducing CSV sweeps");
  std::string g_name, g_dir = "figures";
  cmd_fig->add_option("--name", g_name, "fig1 | fig2 | fig3 | fig4 | fig5")
      ->required()
      ->check(CLI::IsMember(hdqkd::figure_names()));
  cmd_fig->add_option("--out-dir", g_dir, "output directory (default ./figures)");
  cmd_fig->callback([&] {
    const std::vector<std::string> paths = hdqkd::write_figure(g_name, g_dir);
    json rec = base_record("figure", {{"name", g_name}, {"out_dir", g_dir}});
    rec["results"] = {{"files", paths}};
    rec["wall_time_ms"] = wall_ms();
    std::ostringstream os;
    for (const auto& p : paths) os << "wrote " << p << "\n";
    emit(out, rec, os.str());
  });

  // -- verify ----------------------------------------------------------
  auto* cmd_verify = app.add_subcommand("verify", "run the self-check suites");
  std::string v_level = "quick";
  std::uint64_t v_seed = 20240901;
  bool v_fault = false;
  cmd_verify->add_option("--level", v_level, "quick (d<=3, seconds) or full (d<=7)")
      ->check(CLI::IsMember({"quick", "full"}));
  cmd_verify->add_option("--seed", v_seed, "seed for the random-state fixtures");
  cmd_verify->add_flag("--inject-fault", v_fault,
                       "testing aid: corrupt one check input and expect failure");
  int verify_exit = kExitOk;
  cmd_verify->callback([&] {
    const auto level =
        v_level == "quick" ? hdqkd::VerifyLevel::quick : hdqkd::VerifyLevel::full;
    const auto results = hdqkd::run_verification(level, v_seed, v_fault);
    json suites = json::array();
    std::ostringstream os;
    bool all_passed = true;
    for (const auto& s : results) {
      all_passed = all_passed && s.passed();
      suites.push_back({{"name", s.name},
                        {"checks", s.checks},
                        {"failures", s.failures},
                        {"first_failure", s.first_failure}});
      os << (s.passed() ? "PASS" : "FAIL") << "  " << s.name << "  (" << s.checks
         << " checks";
      if (!s.passed()) os << ", " << s.failures << " failed: " << s.first_failure;
      os << ")\n";
    }
    os << (all_passed ? "all suites passed\n" : "verification FAILED\n");
    json rec = base_record("verify", {{"level", v_level}, {"seed", v_seed},
                                      {"inject_fault", v_fault}});
    rec["results"] = {{"passed", all_passed}, {"suites", suites}};
    rec["wall_time_ms"] = wall_ms();
    emit(out, rec, os.str());
    if (!all_passed) verify_exit = kExitVerifyFailed;
  });

  try {
    args = apply_config(args);
    // CLI11 expects argv order reversed in its vector-parse entry point.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitUsage;
  } catch (const hdqkd::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailed;
  }
  return verify_exit;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}
