// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "sharpmtg/bellman.hpp"
#include "sharpmtg/bessel.hpp"
#include "sharpmtg/legendre.hpp"
#include "sharpmtg/martingale.hpp"
#include "sharpmtg/rodrigues.hpp"
#include "sharpmtg/sharp_constant.hpp"

using namespace sharpmtg;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

Verdict ac1() {
  Verdict v;
  const SharpConstants k2 = compute_sharp_constants(2.0);
  v.require(std::abs(k2.c_p - 1.0) <= 1e-12, fmt::format("c_2 = {}", k2.c_p));
  v.require(std::abs(k2.z_p) <= 1e-12, fmt::format("z_2 = {}", k2.z_p));
  // Largest zeros of L_2 and L_3 are 1/sqrt(3) and sqrt(3/5).
  const double c6 = sharp_cp(6.0), c12 = sharp_cp(12.0);
  v.require(std::abs(c6 - (2.0 + std::sqrt(3.0))) <= 1e-9, fmt::format("c_6 = {:.17g}", c6));
  v.require(std::abs(c12 - (4.0 + std::sqrt(15.0))) <= 1e-9, fmt::format("c_12 = {:.17g}", c12));
  const RodriguesPolynomial l2(2), l3(3);
  v.require(std::abs(l2(1.0 / std::sqrt(3.0))) <= 1e-15 && std::abs(l3(std::sqrt(0.6))) <= 1e-15,
            "closed-form zeros are not Rodrigues roots");
  return v;
}

Verdict ac2() {
  Verdict v;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 1; n <= 8; ++n) {
    const LegendreSolution sol = LegendreSolution::from_alpha(n);
    const RodriguesPolynomial L(n);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double s = u(rng);
      worst = std::max(worst, std::abs(legendre_f1(sol, s) - L(s)));
    }
    v.require(worst <= 1e-12, fmt::format("n = {}: max error {:.3g}", n, worst));
  }
  return v;
}

Verdict ac3() {
  Verdict v;
  for (double alpha : {1.5, 2.0, 2.7, 3.0, 4.3}) {
    const LegendreSolution sol = LegendreSolution::from_alpha(alpha);
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double s = -0.9 + (0.999 + 0.9) * i / 100.0;
      worst = std::max(worst, std::abs(legendre_f1(sol, s) - legendre_f1_ode_oracle(alpha, s, 1e-4)));
    }
    v.require(worst <= 1e-8, fmt::format("alpha = {}: max difference {:.3g}", alpha, worst));
  }
  return v;
}

Verdict ac4() {
  Verdict v;
  const double j0 = find_j0();
  v.require(std::abs(j0 - 2.4048) <= 5e-5, fmt::format("j0 = {:.15g}", j0));
  return v;
}

Verdict ac5() {
  Verdict v;
  const std::vector<double> ps{10, 30, 100, 300, 1000, 3000, 10000};
  const AsymptoticsReport rep = asymptotics_report(ps);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    v.require(rep.rows[i].p_one_minus_z > rep.rows[i - 1].p_one_minus_z,
              fmt::format("p(1 - z_p) not increasing at p = {}", rep.rows[i].p));
  }
  const AsymptoticsRow& last = rep.rows.back();
  const double e1 = std::abs(last.p_one_minus_z / rep.j0_sq_half - 1.0);
  const double e2 = std::abs(last.cp_over_p / rep.four_over_j0_sq - 1.0);
  v.require(e1 <= 0.02, fmt::format("p(1 - z_p) off by {:.3g}", e1));
  v.require(e2 <= 0.02, fmt::format("c_p / p off by {:.3g}", e2));
  if (v.pass) v.detail = fmt::format("relative gaps at p = 1e4: {:.3g}, {:.3g}", e1, e2);
  return v;
}

Verdict ac6() {
  Verdict v;
  const char* required[] = {"zpestimate",       "ellp",         "convexity_f1", "beta_increasing", "a_decreasing",
                            "f2_negative_at_zero", "zero_minimality"};
  for (double p : {2.5, 6.0, 7.5, 12.0, 30.0}) {
    const LegendreSolution sol(p);
    const ConstantsReport rep = verify_lemmas(sol, compute_sharp_constants(sol));
    for (const char* name : required) {
      const CheckResult* c = rep.find(name);
      v.require(c != nullptr && c->pass, fmt::format("p = {}: {}", p, name));
    }
    v.require(rep.all_pass(), fmt::format("p = {}: auxiliary lemma check failed", p));
  }
  return v;
}

Verdict ac7() {
  Verdict v;
  VerifyOptions opt;
  opt.grid = 2000;
  for (double p : {2.5, 3.0, 6.0, 7.5, 12.0, 20.0, 30.0}) {
    const BellmanCandidate g(p);
    for (const auto& c : verify_supersolution(g, opt)) v.require(c.pass, fmt::format("p = {}: {}", p, c.name));
    for (const auto& c : verify_quadratic_form(g, opt)) v.require(c.pass, fmt::format("p = {}: {}", p, c.name));
  }
  const double c = 0.99 * sharp_cp(6.0);
  const BellmanCandidate low = BellmanCandidate::with_override_c(6.0, c);
  bool majorization_failed = false, finite_failed = false;
  for (const auto& r : verify_all(low, opt)) {
    if (r.name == "majorization") majorization_failed = !r.pass;
    if (r.name == "finite_majorant") finite_failed = !r.pass;
  }
  v.require(majorization_failed && finite_failed, "0.99 c_6 was not rejected");
  return v;
}

Verdict ac8() {
  Verdict v;
  mc::McOptions opt;
  opt.n_paths = 100000;
  opt.n_steps = 256;
  opt.seed = 1;
  const std::vector<double> ps{3.0, 6.0, 12.0};
  double worst_margin = -1e300;
  for (const auto& name : mc::strategy_names()) {
    std::vector<mc::PathEstimate> rows;
    if (name == "greedy") {
      for (double p : ps) rows.push_back(mc::run_mc(mc::make_strategy(name, p), p, opt));
    } else {
      rows = mc::run_mc_multi(mc::make_strategy(name, ps.front()), ps, opt);
    }
    for (const auto& e : rows) {
      const double cp = sharp_cp(e.p);
      v.require(e.ratio <= cp + 3.0 * e.se, fmt::format("{} at p = {}: {} > {} + 3 * {}", name, e.p, e.ratio, cp, e.se));
      worst_margin = std::max(worst_margin, e.ratio / cp);
      if (name == "identity") {
        v.require(std::abs(e.ratio - 1.0) <= 3.0 * e.se + 1e-14, fmt::format("identity ratio {}", e.ratio));
      }
      if (name == "ab-general") {
        v.require(e.max_qv_ratio <= 4.0, fmt::format("A*Z quadratic variation ratio {}", e.max_qv_ratio));
      }
      if (name == "ab-orthogonal") {
        v.require(e.max_qv_ratio <= 1.0 + 1e-12, fmt::format("scaled A*Z quadratic variation ratio {}", e.max_qv_ratio));
      }
    }
  }
  if (v.pass) v.detail = fmt::format("largest ratio / c_p = {:.4f}", worst_margin);
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Verdict ac9(const std::string& cli, const std::string& dir) {
  Verdict v;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"constant", "constant --p 7.5"},
      {"table", "table --p-list 3,6,12,100"},
      {"verify", "verify --p 6"},
      {"simulate", "simulate --p-list 3,6,12 --strategy all --paths 20000 --steps 64 --seed 17"},
  };
  for (const auto& [tag, args] : commands) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "4"}) {
      const std::string out = fmt::format("{}/ac9_{}_{}_{}.out", dir, tag, threads, outputs.size());
      const std::string cmd =
          fmt::format("SHARP_MTG_THREADS={} \"{}\" {} --out \"{}\" 2>/dev/null", threads, cli, args, out);
      const int rc = std::system(cmd.c_str());
      v.require(rc == 0, fmt::format("'{}' exited with {}", args, rc));
      outputs.push_back(slurp(out));
      std::remove(out.c_str());
    }
    v.require(!outputs[0].empty(), fmt::format("'{}' wrote nothing", args));
    v.require(outputs[0] == outputs[1], fmt::format("'{}' differs between repeated runs", args));
    v.require(outputs[0] == outputs[2], fmt::format("'{}' differs between 1 and 4 workers", args));
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <path-to-cli> <scratch-dir>\n";
    return 2;
  }
  const std::string cli = argv[1], dir = argv[2];

  struct Criterion {
    const char* id;
    const char* title;
    double budget_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "exact-boundary constants", 1, ac1},
      {"AC2", "integer-degree equivalence", 1, ac2},
      {"AC3", "series vs ODE cross-oracle", 10, ac3},
      {"AC4", "Bessel anchor", 1, ac4},
      {"AC5", "asymptotics", 60, ac5},
      {"AC6", "lemma suite", 60, ac6},
      {"AC7", "Bellman certification", 120, ac7},
      {"AC8", "Monte-Carlo bound", 300, ac8},
      {"AC9", "determinism", 60, [&] { return ac9(cli, dir); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) v.require(false, fmt::format("over the {} s budget", c.budget_s));
    failures += v.pass ? 0 : 1;
    std::cout << fmt::format("{} {} - {} ({:.2f} s){}\n", c.id, v.pass ? "PASS" : "FAIL", c.title, secs,
                             v.detail.empty() ? "" : ": " + v.detail)
              << std::flush;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
