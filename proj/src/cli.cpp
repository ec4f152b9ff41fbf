#include "sharpmtg/cli.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "sharpmtg/bellman.hpp"
#include "sharpmtg/martingale.hpp"
#include "sharpmtg/numeric.hpp"
#include "sharpmtg/report.hpp"
#include "sharpmtg/sharp_constant.hpp"

namespace sharpmtg {
namespace {

struct RunConfig {
  double p = 6.0;
  std::vector<double> p_list;
  double zero_tol = kDefaultZeroTol;
  double num_tol = kDefaultNumTol;
  int grid = 2000;
  double override_c = std::numeric_limits<double>::quiet_NaN();
  int paths = 100000;
  int steps = 256;
  double t_final = 1.0;
  std::uint64_t seed = 1;
  std::vector<std::string> strategies{"identity"};
  std::string out_path;
  std::string format;
};

const CLI::Validator kExponentRange =
    CLI::Validator([](std::string& s) -> std::string {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(s, &used);
        if (used != s.size()) return "not a number: " + s;
      } catch (const std::exception&) {
        return "not a number: " + s;
      }
      if (!(v >= 2.0) || !std::isfinite(v)) return fmt::format("p = {} is outside [2, inf)", s);
      return {};
    }, "P>=2");

std::string g15(double x) { return std::isfinite(x) ? format_g15(x) : std::string("nan"); }

std::string constant_output(const SharpConstants& k, const std::string& format) {
  if (format == "csv") {
    return fmt::format("p,alpha,z_p,c_p,a_p,i_p\n{},{},{},{},{},{}\n", g15(k.p), g15(k.alpha), g15(k.z_p), g15(k.c_p),
                       g15(k.a_p), g15(k.i_p));
  }
  const nlohmann::json j = {{"p", json_number(k.p)},     {"alpha", json_number(k.alpha)}, {"z_p", json_number(k.z_p)},
                            {"c_p", json_number(k.c_p)}, {"a_p", json_number(k.a_p)},     {"i_p", json_number(k.i_p)}};
  return j.dump(2) + "\n";
}

std::string table_output(const AsymptoticsReport& rep, const std::string& format) {
  if (format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows) {
      rows.push_back({{"p", json_number(r.p)},
                      {"z_p", json_number(r.z_p)},
                      {"c_p", json_number(r.c_p)},
                      {"p_one_minus_z", json_number(r.p_one_minus_z)},
                      {"cp_over_p", json_number(r.cp_over_p)},
                      {"fg1_constant", json_number(r.fg1_constant)},
                      {"baj_constant", json_number(r.baj_constant)}});
    }
    const nlohmann::json j = {{"j0", json_number(rep.j0)},
                              {"j0_sq_half", json_number(rep.j0_sq_half)},
                              {"four_over_j0_sq", json_number(rep.four_over_j0_sq)},
                              {"rows", rows}};
    return j.dump(2) + "\n";
  }
  std::string s = fmt::format("# j0 = {}\n# j0^2/2 = {}\n# 4/j0^2 = {}\n", g15(rep.j0), g15(rep.j0_sq_half),
                              g15(rep.four_over_j0_sq));
  s += "p,z_p,c_p,p_one_minus_z,cp_over_p,fg1_constant,baj_constant\n";
  for (const auto& r : rep.rows) {
    s += fmt::format("{},{},{},{},{},{},{}\n", g15(r.p), g15(r.z_p), g15(r.c_p), g15(r.p_one_minus_z),
                     g15(r.cp_over_p), g15(r.fg1_constant), g15(r.baj_constant));
  }
  return s;
}

// Returns the exit code; fills `text`.
int verify_output(const RunConfig& cfg, std::string& text) {
  const bool overridden = std::isfinite(cfg.override_c);
  const BellmanCandidate g = overridden ? BellmanCandidate::with_override_c(cfg.p, cfg.override_c, cfg.zero_tol)
                                        : BellmanCandidate(cfg.p, cfg.zero_tol);
  VerifyOptions opt;
  opt.grid = cfg.grid;
  opt.num_tol = cfg.num_tol;
  if (cfg.format == "csv") {
    std::ostringstream os;
    write_candidate_csv(g, opt, os);
    text = os.str();
    return kExitOk;
  }
  const ConstantsReport lemmas = verify_lemmas(g.legendre(), g.constants());
  const std::vector<CheckResult> checks = verify_all(g, opt);
  const bool pass = lemmas.all_pass() && all_pass(checks);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) arr.push_back(to_json(c, g.p()));
  const SharpConstants& k = g.constants();
  const nlohmann::json j = {{"p", json_number(k.p)},
                            {"z_p", json_number(k.z_p)},
                            {"c_p", json_number(k.c_p)},
                            {"a_p", json_number(k.a_p)},
                            {"i_p", json_number(k.i_p)},
                            {"c", json_number(g.c())},
                            {"amplitude", json_number(g.amplitude())},
                            {"override_c", overridden ? json_number(cfg.override_c) : nlohmann::json(nullptr)},
                            {"num_tol", json_number(cfg.num_tol)},
                            {"grid", cfg.grid},
                            {"lemmas", to_json(lemmas)},
                            {"checks", arr},
                            {"pass", pass}};
  text = j.dump(2) + "\n";
  return pass ? kExitOk : kExitVerificationFailed;
}

std::string simulate_output(const RunConfig& cfg, std::ostream& err) {
  std::vector<double> ps = cfg.p_list.empty() ? std::vector<double>{cfg.p} : cfg.p_list;
  mc::McOptions opt;
  opt.n_paths = cfg.paths;
  opt.n_steps = cfg.steps;
  opt.t_final = cfg.t_final;
  opt.seed = cfg.seed;

  std::vector<std::string> names;
  for (const auto& name : cfg.strategies) {
    if (name == "all") {
      const auto every = mc::strategy_names();
      names.insert(names.end(), every.begin(), every.end());
    } else {
      names.push_back(name);
    }
  }

  std::vector<mc::PathEstimate> all;
  for (const auto& name : names) {
    if (name == "greedy") {
      // Depends on c_p, one simulation per p.
      for (double p : ps) all.push_back(mc::run_mc(mc::make_strategy(name, p), p, opt));
    } else {
      const auto rows = mc::run_mc_multi(mc::make_strategy(name, ps.front()), ps, opt);
      all.insert(all.end(), rows.begin(), rows.end());
    }
  }
  for (const auto& e : all) {
    if (e.heavy_tail_warning) {
      err << fmt::format("warning: {} at p={}: kurtosis proxy {} suggests heavy tails; SE may be unreliable\n",
                         e.strategy, g15(e.p), g15(e.kurtosis_proxy));
    }
  }
  if (cfg.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : all) {
      rows.push_back({{"strategy", e.strategy},
                      {"p", json_number(e.p)},
                      {"n_paths", e.n_paths},
                      {"n_steps", e.n_steps},
                      {"t_final", json_number(e.t_final)},
                      {"seed", e.seed},
                      {"est_Zp", json_number(e.est_Zp)},
                      {"est_Wp", json_number(e.est_Wp)},
                      {"se_Zp", json_number(e.se_Zp)},
                      {"se_Wp", json_number(e.se_Wp)},
                      {"ratio", json_number(e.ratio)},
                      {"se", json_number(e.se)},
                      {"c_p", json_number(sharp_cp(e.p))}});
    }
    return nlohmann::json{{"runs", rows}}.dump(2) + "\n";
  }
  std::ostringstream os;
  mc::write_csv_header(os);
  for (const auto& e : all) mc::write_csv_row(e, os);
  return os.str();
}

int emit(const std::string& text, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.out_path.empty()) {
    out << text;
    return kExitOk;
  }
  std::ofstream f(cfg.out_path, std::ios::binary);
  if (!f) {
    err << "error: cannot open " << cfg.out_path << " for writing\n";
    return kExitUsage;
  }
  f << text;
  return f ? kExitOk : kExitNumerical;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sharp L^p constants for orthogonal martingales", "sharpmtg"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub, const std::string& default_format, std::vector<std::string> formats) {
    cfg.format = default_format;
    sub->add_option("--out", cfg.out_path, "Write output to this file instead of stdout");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember(formats));
  };

  auto* constant = app.add_subcommand("constant", "z_p, c_p, a_p, i_p for one p");
  constant->add_option("--p", cfg.p, "Exponent p >= 2")->required()->check(kExponentRange);
  constant->add_option("--zero-tol", cfg.zero_tol, "Bracket width for z_p")->check(CLI::PositiveNumber);

  auto* table = app.add_subcommand("table", "Asymptotics of z_p and c_p over a list of p");
  table->add_option("--p-list", cfg.p_list, "Comma-separated exponents")
      ->required()
      ->delimiter(',')
      ->check(kExponentRange);
  table->add_option("--zero-tol", cfg.zero_tol, "Bracket width for z_p")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Certify the Bellman candidate for one p");
  verify->add_option("--p", cfg.p, "Exponent p > 2")->required()->check(kExponentRange);
  verify->add_option("--zero-tol", cfg.zero_tol, "Bracket width for z_p")->check(CLI::PositiveNumber);
  verify->add_option("--num-tol", cfg.num_tol, "Scaled tolerance of the <= 0 checks")->check(CLI::PositiveNumber);
  verify->add_option("--grid", cfg.grid, "Points of the s-grid")->check(CLI::Range(100, 10000000));
  verify->add_option("--override-c", cfg.override_c, "Use this c instead of c_p")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo estimate of ||W||_p / ||Z||_p");
  auto* p_opt = simulate->add_option("--p", cfg.p, "Exponent p >= 2")->check(kExponentRange);
  simulate->add_option("--p-list", cfg.p_list, "Comma-separated exponents")
      ->delimiter(',')
      ->check(kExponentRange)
      ->excludes(p_opt);
  simulate->add_option("--paths", cfg.paths, "Number of paths")->check(CLI::Range(1000, 100000000));
  simulate->add_option("--steps", cfg.steps, "Time steps per path")->check(CLI::Range(1, 10000000));
  simulate->add_option("--t-final", cfg.t_final, "Final time")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", cfg.seed, "Base seed");
  std::vector<std::string> strategy_choices = mc::strategy_names();
  strategy_choices.push_back("all");
  simulate->add_option("--strategy", cfg.strategies, "Strategy names, comma-separated, or all")
      ->delimiter(',')
      ->check(CLI::IsMember(strategy_choices));

  add_common(constant, "json", {"json", "csv"});
  add_common(table, "csv", {"json", "csv"});
  add_common(verify, "json", {"json", "csv"});
  add_common(simulate, "csv", {"json", "csv"});
  cfg.format.clear();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::string text;
    int code = kExitOk;
    if (*constant) {
      if (cfg.format.empty()) cfg.format = "json";
      text = constant_output(compute_sharp_constants(cfg.p, cfg.zero_tol), cfg.format);
    } else if (*table) {
      if (cfg.format.empty()) cfg.format = "csv";
      text = table_output(asymptotics_report(cfg.p_list, cfg.zero_tol), cfg.format);
    } else if (*verify) {
      if (cfg.format.empty()) cfg.format = "json";
      if (!(cfg.p > 2.0)) throw std::domain_error("verify needs p > 2 (the candidate degenerates at p = 2)");
      code = verify_output(cfg, text);
    } else if (*simulate) {
      if (cfg.format.empty()) cfg.format = "csv";
      text = simulate_output(cfg, err);
    }
    const int written = emit(text, cfg, out, err);
    return written != kExitOk ? written : code;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace sharpmtg
