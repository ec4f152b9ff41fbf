#include "sharpmtg/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "sharpmtg/numeric.hpp"

namespace sharpmtg {
namespace {

constexpr double kGlueOffset = 1e-9;

double scale_of(const Jet& g) { return 1.0 + std::abs(g.value) + std::abs(g.d1) + std::abs(g.d2); }

void require_interior(double s) {
  if (!(std::abs(s) < 1.0)) throw std::domain_error(fmt::format("operator evaluated at s = {} (need |s| < 1)", s));
}

struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  double where = std::numeric_limits<double>::quiet_NaN();
  void take(double v, double s) {
    if (v > value || std::isnan(v)) {
      value = v;
      where = s;
    }
  }
};

CheckResult finish(std::string name, const Worst& w, int grid, double limit) {
  CheckResult c;
  c.name = std::move(name);
  c.max_residual = w.value;
  c.location = w.where;
  c.grid_size = grid;
  c.pass = w.value <= limit;
  return c;
}

bool near_endpoint(double s, const VerifyOptions& opt) { return 1.0 - std::abs(s) < opt.clear_zone; }

}  // namespace

double D_op(double p, double s, const Jet& g) {
  require_interior(s);
  return (1.0 - s) * (1.0 + s) * g.d2 - 2.0 * s * g.d1 + p * g.value;
}

double K_op(double p, double s, const Jet& g) {
  require_interior(s);
  return p * (p - 1.0) * g.value - 2.0 * (p - 1.0) * s * g.d1 - (1.0 - s) * (1.0 + s) * g.d2;
}

double Dtilde_op(double p, double s, const Jet& g) {
  return D_op(p, s, g) / ((1.0 - s) * (1.0 + s)) + K_op(p, s, g);
}

QuadFormCoeffs quad_form_coeffs(double p, double s, const Jet& g, bool cleared) {
  require_interior(s);
  const double m = cleared ? (1.0 - s) * (1.0 + s) : 1.0;
  QuadFormCoeffs q;
  q.cleared = cleared;
  q.phi_xx = m * (p * (p - 1.0) * g.value - 2.0 * (p - 1.0) * (1.0 + s) * g.d1 + (1.0 + s) * (1.0 + s) * g.d2);
  q.phi_yy = m * (p * (p - 1.0) * g.value + 2.0 * (p - 1.0) * (1.0 - s) * g.d1 + (1.0 - s) * (1.0 - s) * g.d2);
  q.phi_xy = m * (p * (p - 1.0) * g.value - 2.0 * (p - 1.0) * s * g.d1 - (1.0 - s) * (1.0 + s) * g.d2);
  if (cleared) {
    q.phi_x_over_x = 2.0 * p * (1.0 + s) * g.value - 2.0 * (1.0 + s) * (1.0 + s) * g.d1;
    q.phi_y_over_y = 2.0 * p * (1.0 - s) * g.value + 2.0 * (1.0 - s) * (1.0 - s) * g.d1;
  } else {
    q.phi_x_over_x = 2.0 * p / (1.0 - s) * g.value - 2.0 * (1.0 + s) / (1.0 - s) * g.d1;
    q.phi_y_over_y = 2.0 * p / (1.0 + s) * g.value + 2.0 * (1.0 - s) / (1.0 + s) * g.d1;
  }
  return q;
}

BellmanCandidate::BellmanCandidate(LegendreSolution sol, SharpConstants k, double c, double amplitude,
                                   bool overridden)
    : sol_(std::move(sol)), consts_(k), obstacle_(k.p, c), amplitude_(amplitude), overridden_(overridden) {}

BellmanCandidate::BellmanCandidate(double p, double zero_tol) : BellmanCandidate(build(p, std::nullopt, zero_tol)) {}

BellmanCandidate BellmanCandidate::with_override_c(double p, double c, double zero_tol) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::domain_error(fmt::format("BellmanCandidate: c = {} must be positive", c));
  return build(p, c, zero_tol);
}

BellmanCandidate BellmanCandidate::build(double p, std::optional<double> c_override, double zero_tol) {
  if (!(p > 2.0)) throw std::domain_error(fmt::format("BellmanCandidate: p = {} must exceed 2", p));
  LegendreSolution sol(p);
  const SharpConstants k = compute_sharp_constants(sol, zero_tol);
  if (!c_override) return BellmanCandidate(std::move(sol), k, k.c_p, k.a_p, false);
  const double c = *c_override;
  const Obstacle h(p, c);
  const double a = h.d1(k.z_p) / sol.jet(k.z_p).d1;
  return BellmanCandidate(std::move(sol), k, c, a, true);
}

Jet BellmanCandidate::jet_right(double s) const {
  const Jet f = sol_.jet(s);
  return {amplitude_ * f.value, amplitude_ * f.d1, amplitude_ * f.d2};
}

Jet BellmanCandidate::jet(double s) const {
  if (!(s >= -1.0 && s <= 1.0)) throw std::domain_error(fmt::format("BellmanCandidate: s = {} outside [-1, 1]", s));
  return s >= glue() ? jet_right(s) : jet_left(s);
}

double reconstruct_phi(const BellmanCandidate& g, double x, double y) {
  if (!(x >= 0.0 && y >= 0.0) || x + y == 0.0) {
    throw std::domain_error("reconstruct_phi: need x, y >= 0, not both zero");
  }
  const double t = x + y;
  return std::pow(t, g.p()) * g.value((y - x) / t);
}

std::vector<double> verification_grid(const BellmanCandidate& g, const VerifyOptions& opt) {
  if (opt.grid < 2) throw std::invalid_argument("verification_grid: need at least two points");
  const double lo = -1.0 + opt.endpoint_gap, hi = 1.0 - opt.endpoint_gap;
  const double z = g.glue();
  std::vector<double> out;
  out.reserve(opt.grid + 2);
  for (int i = 0; i < opt.grid; ++i) {
    const double s = lo + (hi - lo) * i / (opt.grid - 1);
    if (std::abs(s - z) > kGlueOffset) out.push_back(s);
  }
  out.push_back(z - kGlueOffset);
  out.push_back(z + kGlueOffset);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CheckResult> verify_supersolution(const BellmanCandidate& g, const VerifyOptions& opt) {
  const double p = g.p();
  const auto grid = verification_grid(g, opt);
  Worst minus, plus, kright;
  for (double s : grid) {
    const Jet j = g.jet(s);
    const double sc = scale_of(j);
    const double d = D_op(p, s, j);
    const double k = K_op(p, s, j);
    minus.take(d / sc, s);
    const double dt = near_endpoint(s, opt) ? d + (1.0 - s) * (1.0 + s) * k : d / ((1.0 - s) * (1.0 + s)) + k;
    plus.take(dt / sc, s);
    if (s >= g.glue()) kright.take(k / sc, s);
  }
  const int n = static_cast<int>(grid.size());
  return {finish("minus", minus, n, opt.num_tol), finish("plus", plus, n, opt.num_tol),
          finish("K_nonpositive_right", kright, n, opt.num_tol)};
}

std::vector<CheckResult> verify_quadratic_form(const BellmanCandidate& g, const VerifyOptions& opt) {
  const double p = g.p();
  const auto grid = verification_grid(g, opt);
  std::vector<double> us(opt.u_samples), bs(opt.b_samples);
  for (int i = 0; i < opt.u_samples; ++i) us[i] = -std::cos(std::numbers::pi * i / (opt.u_samples - 1));
  for (int i = 0; i < opt.b_samples; ++i) bs[i] = static_cast<double>(i + 1) / opt.b_samples;
  us.front() = -1.0;
  us.back() = 1.0;

  Worst sampled, k0, exact, middle, triangle, obstacle_middle;
  for (double s : grid) {
    const Jet j = g.jet(s);
    const double sc = scale_of(j);
    const QuadFormCoeffs q = quad_form_coeffs(p, s, j, near_endpoint(s, opt));

    double best = q.A();
    for (double u : us) {
      for (double b : bs) best = std::max(best, q.form(u, b));
    }
    sampled.take(best / sc, s);
    k0.take(q.A() / sc, s);

    // max over u in [-1, 1], b in [0, 1]: u = sign(B), then a 1-D quadratic in b.
    const double A = q.A(), B = std::abs(q.B()), C = q.C();
    double top = std::max(A, A + 2.0 * B + C);
    if (C < 0.0 && -B / C < 1.0) top = std::max(top, A - B * B / C);
    exact.take(top / sc, s);

    const double disc = q.discriminant();
    if (disc >= 0.0) middle.take((std::abs(B - std::sqrt(disc)) - std::abs(A)) / sc, s);

    if (s >= g.glue()) {
      const double lhs = std::abs(std::abs(-2.0 * s * j.d1 + p * j.value) - 2.0 * std::abs(j.d1));
      const double rhs = std::abs(-2.0 * (1.0 + s) * j.d1 + p * j.value);
      triangle.take((lhs - rhs) / sc, s);
    } else {
      const double y = (1.0 + s) / 2.0, x = (1.0 - s) / 2.0;
      obstacle_middle.take((std::pow(y, p - 2.0) - g.obstacle().weighted_x(x, 2)) / sc, s);
    }
  }
  const int n = static_cast<int>(grid.size());
  const int dirs = opt.u_samples * opt.b_samples;
  auto q = finish("quad_form", sampled, n * dirs, opt.num_tol);
  return {q,
          finish("quad_form_k0", k0, n, opt.num_tol),
          finish("quad_form_exact", exact, n, opt.num_tol),
          finish("middle", middle, n, opt.num_tol),
          finish("triangle_identity", triangle, n, opt.num_tol),
          finish("middle_obstacle", obstacle_middle, n, opt.num_tol)};
}

std::vector<CheckResult> verify_tangent_separation(const BellmanCandidate& g, const VerifyOptions& opt) {
  // The tangent facts concern the sharp pair (c_p, a_p), whatever c the candidate uses.
  const SharpConstants& k = g.constants();
  const double p = k.p, z = k.z_p;
  const Obstacle h(p, k.c_p);
  const LegendreSolution& sol = g.legendre();
  const double slope = p * std::pow((1.0 + z) / 2.0, p - 1.0) / (1.0 - z);
  auto line = [&](double s) { return h.value(z) + slope * (s - z); };

  std::vector<CheckResult> out;
  {
    // Five-point central difference.
    const double e = 1e-5;
    const double numeric =
        (-h.value(z + 2 * e) + 8 * h.value(z + e) - 8 * h.value(z - e) + h.value(z - 2 * e)) / (12 * e);
    Worst w;
    w.take(std::abs(numeric - slope) / std::max(1.0, std::abs(slope)), z);
    out.push_back(finish("tangent_slope", w, 1, 1e-9));
  }
  {
    Worst w;
    const int n = 200;
    for (int i = 1; i <= n; ++i) {
      const double s = z + (1.0 - opt.endpoint_gap - z) * i / n;
      const double f = k.a_p * sol.value(s);
      const double l = line(s);
      const double sc = 1.0 + std::abs(f) + std::abs(slope);
      w.take(std::max(l - f, h.value(s) - l) / sc, s);
    }
    out.push_back(finish("tangent_separation", w, n, opt.num_tol));
  }
  {
    Worst w;
    w.take(1.0 - line(1.0), 1.0);
    out.push_back(finish("ellp_tangent", w, 1, 0.0));
  }
  {
    Worst w;
    const double i = k.i_p;
    w.take(h.value(i) - line(i), i);
    auto c = finish("tangent_at_inflection", w, 1, 0.0);
    c.pass = w.value < 0.0;
    out.push_back(c);
  }
  return out;
}

std::vector<CheckResult> verify_candidate_shape(const BellmanCandidate& g, const VerifyOptions& opt) {
  const double p = g.p(), z = g.glue(), c = g.c();
  const Obstacle& h = g.obstacle();
  std::vector<CheckResult> out;
  {
    const Jet r = g.jet_right(z);
    Worst w;
    w.take(std::max(std::abs(r.value - h.value(z)), std::abs(r.d1 - h.d1(z))), z);
    out.push_back(finish("c1_matching", w, 2, 1e-9));
  }
  {
    Worst w;
    const auto grid = verification_grid(g, opt);
    for (double s : grid) {
      const Jet j = g.jet(s);
      w.take((h.value(s) - j.value) / scale_of(j), s);
    }
    out.push_back(finish("majorization", w, static_cast<int>(grid.size()), opt.num_tol));
  }
  {
    Worst w;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double x = 2.0 * i / (n - 1), y = 2.0 * j / (n - 1);
        if (x + y == 0.0) continue;
        const double phi = reconstruct_phi(g, x, y);
        const double psi = std::pow(y, p) - std::pow(c * x, p);
        w.take((psi - phi) / std::max({1.0, std::abs(phi), std::abs(psi)}), (y - x) / (x + y));
      }
    }
    out.push_back(finish("majorization_phi", w, n * n, opt.num_tol));
  }
  {
    Worst w;
    w.take(h.d2(z) - g.jet_right(z).d2, z);
    out.push_back(finish("jump_at_glue", w, 1, 1e-9));
  }
  {
    Worst w;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.01, 2.0);
    int count = 0;
    for (int i = 0; i < 20; ++i) {
      const double x = unit(rng), y = unit(rng);
      const double base = reconstruct_phi(g, x, y);
      for (double t : {0.5, 2.0, 3.0}) {
        const double scaled = reconstruct_phi(g, t * x, t * y);
        w.take(std::abs(scaled - std::pow(t, p) * base) / std::max(1e-300, std::abs(scaled)), (y - x) / (x + y));
        ++count;
      }
    }
    out.push_back(finish("homogeneity", w, count, 1e-10));
  }
  return out;
}

CheckResult verify_minimal_family(const BellmanCandidate& g, const VerifyOptions& opt) {
  const LegendreSolution& sol = g.legendre();
  const Obstacle& h = g.obstacle();
  const double z = g.glue();
  const int n = 200;
  std::vector<double> grid(n), f1(n), f2(n), hv(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = z + (1.0 - opt.endpoint_gap - z) * i / (n - 1);
    f1[i] = sol.value(grid[i]);
    f2[i] = sol.second_value(grid[i]);
    hv[i] = h.value(grid[i]);
  }
  std::vector<double> amps{g.amplitude()};
  for (int i = 0; i <= 35; ++i) amps.push_back(g.amplitude() * (0.5 + 0.1 * i));

  // Residual: the smallest majorization defect over finite members (b = 0);
  // members with b > 0 are infinite at s = 1 and never qualify.
  double best = std::numeric_limits<double>::infinity();
  double best_where = std::numeric_limits<double>::quiet_NaN();
  int members = 0;
  for (double b : {0.0, 1e-3, 1e-1, 1.0}) {
    for (double a : amps) {
      ++members;
      double worst = -std::numeric_limits<double>::infinity();
      double where = z;
      for (int i = 0; i < n; ++i) {
        const double v = a * f1[i] + b * f2[i];
        const double d = (hv[i] - v) / (1.0 + std::abs(hv[i]) + std::abs(v));
        if (d > worst) {
          worst = d;
          where = grid[i];
        }
      }
      if (b == 0.0 && worst < best) {
        best = worst;
        best_where = where;
      }
    }
  }
  CheckResult c;
  c.name = "finite_majorant";
  c.max_residual = best;
  c.location = best_where;
  c.grid_size = n * members;
  c.pass = best <= opt.num_tol;
  return c;
}

std::vector<CheckResult> verify_all(const BellmanCandidate& g, const VerifyOptions& opt) {
  std::vector<CheckResult> all;
  for (auto&& part : {verify_supersolution(g, opt), verify_quadratic_form(g, opt), verify_tangent_separation(g, opt),
                      verify_candidate_shape(g, opt)}) {
    all.insert(all.end(), part.begin(), part.end());
  }
  all.push_back(verify_minimal_family(g, opt));
  return all;
}

void write_candidate_csv(const BellmanCandidate& g, const VerifyOptions& opt, std::ostream& out) {
  out << "s,g,dg,d2g,Dg,Dtilde_g\n";
  for (double s : verification_grid(g, opt)) {
    const Jet j = g.jet(s);
    out << fmt::format("{},{},{},{},{},{}\n", format_g15(s), format_g15(j.value), format_g15(j.d1),
                       format_g15(j.d2), format_g15(D_op(g.p(), s, j)), format_g15(Dtilde_op(g.p(), s, j)));
  }
}

}  // namespace sharpmtg
