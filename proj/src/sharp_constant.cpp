#include "sharpmtg/sharp_constant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "sharpmtg/bessel.hpp"
#include "sharpmtg/numeric.hpp"
#include "sharpmtg/obstacle.hpp"

namespace sharpmtg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGridTop = 1.0 - 1e-6;

// Leftward scan from s = 1; returns [lo, hi] with f1(lo) <= 0 < f1(hi).
bool scan_bracket(const LegendreSolution& sol, double step, double& lo, double& hi) {
  const double floor_s = -1.0 + sol.options().radius_guard;
  double prev = 1.0;
  for (long k = 1;; ++k) {
    double s = 1.0 - static_cast<double>(k) * step;
    if (s < floor_s) s = floor_s;
    if (sol.value(s) <= 0.0) {
      lo = s;
      hi = prev;
      return true;
    }
    if (s == floor_s) return false;
    prev = s;
  }
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

CheckResult make_check(std::string name, double worst, int grid, double where, bool pass) {
  CheckResult c;
  c.name = std::move(name);
  c.max_residual = worst;
  c.grid_size = grid;
  c.location = where;
  c.pass = pass;
  return c;
}

// Tracks the largest residual over a grid; passes when it stays below `limit`
// (strictly, if requested).
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  double where = kNaN;
  void take(double v, double s) {
    if (v > value || std::isnan(v)) {
      value = v;
      where = s;
    }
  }
};

}  // namespace

double find_zp(const LegendreSolution& sol, double zero_tol) {
  if (!(zero_tol > 0.0)) throw std::invalid_argument("find_zp: zero_tol must be positive");
  double lo = 0.0, hi = 1.0;
  double step = 0.5 / sol.p();
  bool found = false;
  for (int attempt = 0; attempt < 3 && !found; ++attempt, step /= 2.0) {
    found = scan_bracket(sol, step, lo, hi);
  }
  if (!found) {
    throw NumericalFailure(fmt::format("find_zp: no sign change of f1 found for p = {}", sol.p()));
  }
  if (sol.value(lo) == 0.0) return lo;
  while (hi - lo > zero_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = sol.value(mid);
    if (f == 0.0) return mid;
    (f < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double find_zp(double p, double zero_tol) { return find_zp(LegendreSolution(p), zero_tol); }

double sharp_cp(double p) {
  const double z = find_zp(p);
  return (1.0 + z) / (1.0 - z);
}

double beta_fn(const LegendreSolution& sol, double x) {
  if (!(x < 1.0)) throw std::domain_error("beta_fn: x must be < 1");
  const double p = sol.p();
  const Jet f = sol.jet(x);
  const double y = (1.0 + x) / 2.0, xm = (1.0 - x) / 2.0;
  // Numerator and denominator both divided by 2^p.
  const double num = std::pow(y, p) * f.d1 - p / 2.0 * std::pow(y, p - 1.0) * f.value;
  const double den = std::pow(xm, p) * f.d1 + p / 2.0 * std::pow(xm, p - 1.0) * f.value;
  if (!(den > 0.0)) {
    throw NumericalFailure(fmt::format("beta_fn: denominator {} is not positive at x = {}", den, x));
  }
  return num / den;
}

double a_fn(const LegendreSolution& sol, double x) {
  const double p = sol.p();
  const double b = beta_fn(sol, x);
  const double y = (1.0 + x) / 2.0, xm = (1.0 - x) / 2.0;
  return p / 2.0 * (std::pow(y, p - 1.0) + b * std::pow(xm, p - 1.0)) / sol.jet(x).d1;
}

double compute_ap(const LegendreSolution& sol, double z_p) {
  const double p = sol.p();
  if (!(p > 2.0)) throw std::domain_error("compute_ap: the touching construction needs p > 2");
  const double y = (1.0 + z_p) / 2.0, x = (1.0 - z_p) / 2.0;
  const double c = (1.0 + z_p) / (1.0 - z_p);
  // c^p x^(p-1) in logs; c^p alone overflows for large p.
  const double second = std::exp(p * std::log(c) + (p - 1.0) * std::log(x));
  return p / 2.0 * (std::pow(y, p - 1.0) + second) / sol.jet(z_p).d1;
}

double inflection_point(double p, double c) {
  if (!(p > 2.0) || !(c > 0.0)) return kNaN;
  const double q = std::exp(p / (p - 2.0) * std::log(c));
  if (std::isinf(q)) return 1.0;
  return (q - 1.0) / (q + 1.0);
}

SharpConstants compute_sharp_constants(const LegendreSolution& sol, double zero_tol) {
  SharpConstants k;
  k.p = sol.p();
  k.alpha = sol.alpha();
  k.zero_tol = zero_tol;
  k.z_p = find_zp(sol, zero_tol);
  k.c_p = (1.0 + k.z_p) / (1.0 - k.z_p);
  if (k.p > 2.0) {
    k.a_p = compute_ap(sol, k.z_p);
    k.i_p = inflection_point(k.p, k.c_p);
  } else {
    k.a_p = kNaN;
    k.i_p = kNaN;
  }
  return k;
}

SharpConstants compute_sharp_constants(double p, double zero_tol) {
  return compute_sharp_constants(LegendreSolution(p), zero_tol);
}

AsymptoticsReport asymptotics_report(std::span<const double> p_list, double zero_tol) {
  if (!std::is_sorted(p_list.begin(), p_list.end())) {
    throw std::invalid_argument("asymptotics_report: p_list must be sorted ascending");
  }
  AsymptoticsReport rep;
  rep.j0 = find_j0();
  rep.j0_sq_half = rep.j0 * rep.j0 / 2.0;
  rep.four_over_j0_sq = 4.0 / (rep.j0 * rep.j0);
  for (double p : p_list) {
    const double z = find_zp(p, zero_tol);
    AsymptoticsRow row;
    row.p = p;
    row.z_p = z;
    row.c_p = (1.0 + z) / (1.0 - z);
    row.p_one_minus_z = p * (1.0 - z);
    row.cp_over_p = row.c_p / p;
    row.fg1_constant = std::sqrt(2.0 * (p * p - p));
    row.baj_constant = std::sqrt((p * p - p) / 2.0);
    rep.rows.push_back(row);
  }
  return rep;
}

ConstantsReport verify_lemmas(const LegendreSolution& sol, const SharpConstants& k, const LemmaOptions& opt) {
  const double p = k.p;
  const double z = k.z_p;
  ConstantsReport rep;
  rep.p = p;
  rep.z_p = z;
  rep.c_p = k.c_p;
  rep.a_p = k.a_p;
  rep.i_p = k.i_p;
  auto& checks = rep.checks;
  const bool touching = p > 2.0;

  {
    const double f = sol.value(z);
    const double r = std::abs(f) - k.zero_tol;
    checks.push_back(make_check("zero_residual", r, 1, z, r <= 0.0 || std::abs(f) <= 1e-12));
  }
  {
    Worst w;
    const auto grid = linspace(z, 1.0, opt.grid + 1);
    for (std::size_t i = 1; i < grid.size(); ++i) w.take(-sol.value(grid[i]), grid[i]);
    checks.push_back(make_check("f1_positive_right_of_zero", w.value, opt.grid, w.where, w.value < 0.0));
  }
  {
    const double r = p / (p + 2.0) - (1.0 + z) / 2.0;
    checks.push_back(make_check("zpestimate", r, 1, z, touching ? r < 0.0 : r <= 1e-12));
  }
  {
    const double r = 1.0 - p * std::pow((1.0 + z) / 2.0, p - 1.0);
    checks.push_back(make_check("ellp", r, 1, z, r <= 1e-12));
  }
  {
    const double d = sol.jet(z).d1;
    checks.push_back(make_check("f1_slope_at_zero", -d, 1, z, d > 0.0));
  }
  if (touching) {
    Worst w;
    const auto grid = linspace(z, kGridTop, opt.convexity_grid);
    for (double s : grid) w.take(-sol.jet(s).d2, s);
    checks.push_back(make_check("convexity_f1", w.value, opt.convexity_grid, w.where, w.value < 0.0));

    // beta increasing, a decreasing: residual is the largest backward step
    // relative to the local value.
    const auto bgrid = linspace(z, 1.0 - 1e-4, opt.grid);
    Worst wb, wa, wsign;
    double prev_b = beta_fn(sol, bgrid[0]);
    double prev_a = a_fn(sol, bgrid[0]);
    for (std::size_t i = 1; i < bgrid.size(); ++i) {
      const double s = bgrid[i];
      const double b = beta_fn(sol, s);
      const double a = a_fn(sol, s);
      wb.take((prev_b - b) / std::max(1.0, std::abs(b)), s);
      wa.take((a - prev_a) / std::max(1.0, std::abs(a)), s);
      prev_b = b;
      prev_a = a;

      // beta' from the quotient rule, against the sign of f1 f1''.
      const Jet f = sol.jet(s);
      const double y = (1.0 + s) / 2.0, x = (1.0 - s) / 2.0;
      const double num = std::pow(y, p) * f.d1 - p / 2.0 * std::pow(y, p - 1.0) * f.value;
      const double den = std::pow(x, p) * f.d1 + p / 2.0 * std::pow(x, p - 1.0) * f.value;
      const double dnum = std::pow(y, p - 2.0) * (y * y * f.d2 - p * (p - 1.0) / 4.0 * f.value);
      const double dden = std::pow(x, p - 2.0) * (x * x * f.d2 - p * (p - 1.0) / 4.0 * f.value);
      const double dbeta = (dnum * den - num * dden) / (den * den);
      const double lhs = f.value * f.d2;
      const bool agree = (dbeta > 0.0) == (lhs > 0.0) && dbeta > 0.0;
      wsign.take(agree ? -1.0 : 1.0, s);
    }
    const int n = opt.grid;
    checks.push_back(make_check("beta_increasing", wb.value, n, wb.where, wb.value < 0.0));
    checks.push_back(make_check("a_decreasing", wa.value, n, wa.where, wa.value < 0.0));
    checks.push_back(make_check("beta_derivative_sign", wsign.value, n - 1, wsign.where, wsign.value < 0.0));

    const double a_end = a_fn(sol, 1.0 - 1e-4);
    const double r_end = std::max(1.0 - a_end, a_end - 1.05);
    checks.push_back(make_check("a_limit_at_one", r_end, 1, 1.0 - 1e-4, a_end > 1.0 && a_end < 1.05));

    const double beta_z = beta_fn(sol, z);
    const double cpp = std::pow(k.c_p, p);
    const double rb = std::abs(beta_z - cpp) / cpp - 1e-9;
    checks.push_back(make_check("beta_at_zero", rb, 1, z, rb <= 0.0));

    const Obstacle h(p, k.c_p);
    const Jet f = sol.jet(z);
    const double r0 = std::abs(k.a_p * f.value - h.value(z)) / std::max(1.0, std::abs(h.value(z)));
    const double r1 = std::abs(k.a_p * f.d1 - h.d1(z)) / std::max(1.0, std::abs(h.d1(z)));
    const double rt = std::max(r0, r1) - 1e-9;
    checks.push_back(make_check("touching", rt, 2, z, rt <= 0.0));
    const double ra = std::abs(k.a_p - a_fn(sol, z)) / k.a_p - 1e-9;
    checks.push_back(make_check("ap_matches_a_at_zero", ra, 1, z, ra <= 0.0 && k.a_p > 1.0));

    const double i = k.i_p;
    const double y = (1.0 + i) / 2.0, x = (1.0 - i) / 2.0;
    const double ri = std::abs(std::pow(y, p - 2.0) - h.weighted_x(x, 2)) / std::pow(y, p - 2.0) - 1e-9;
    checks.push_back(make_check("inflection_point", ri, 1, i, ri <= 0.0 && z < i && i < 1.0));
  }

  // f1, f2 on a common grid: Wronskian sign, f2(z_p), zero-minimality.
  {
    const double f2z = sol.second_value(z);
    checks.push_back(make_check("f2_negative_at_zero", f2z, 1, z, f2z < 0.0));

    const auto grid = linspace(-0.9, 1.0 - 1e-4, opt.minimality_grid);
    std::vector<double> f1v(grid.size()), f2v(grid.size());
    Worst ww;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Jet a = sol.jet(grid[i]);
      const Jet b = sol.second_jet(grid[i]);
      f1v[i] = a.value;
      f2v[i] = b.value;
      ww.take(-(a.value * b.d1 - a.d1 * b.value), grid[i]);
    }
    checks.push_back(make_check("wronskian_sign", ww.value, opt.minimality_grid, ww.where, ww.value < 0.0));

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Worst wm;
    for (int pair = 0; pair < opt.minimality_pairs; ++pair) {
      const double c1 = unit(rng);
      double c2 = unit(rng);
      while (std::abs(c2) < 1e-3) c2 = unit(rng);
      // The solution tends to sign(c2) * infinity at s = 1; that limiting sign
      // closes the scan on the right.
      auto sgn = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
      int right = c2 > 0.0 ? 1 : -1;
      double rightmost = -1.0;
      for (std::size_t i = grid.size(); i-- > 0;) {
        const int si = sgn(c1 * f1v[i] + c2 * f2v[i]);
        if (si != right) {
          rightmost = grid[i];
          break;
        }
      }
      wm.take((z - 1e-6) - rightmost, rightmost);
    }
    checks.push_back(make_check("zero_minimality", wm.value, opt.minimality_pairs, wm.where, wm.value <= 0.0));
  }
  return rep;
}

}  // namespace sharpmtg
