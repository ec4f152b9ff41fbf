#include "sharpmtg/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "sharpmtg/numeric.hpp"
#include "sharpmtg/sharp_constant.hpp"

namespace sharpmtg::mc {
namespace {

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
double norm2(const Vec2& a) { return dot(a, a); }

using cplx = std::complex<double>;

cplx unit_or(cplx z, cplx fallback) {
  const double r = std::abs(z);
  return r > 1e-300 ? z / r : fallback;
}

// Angle difference theta - psi that makes the radial increment of |W| equal
// `sign` times the radial increment of |Z| (both rows in the conformal orientation).
double radial_delta(const MartingaleState& st, double sign) {
  const cplx zh = unit_or({st.X, st.Y}, 1.0);
  const cplx wh = unit_or({st.U, st.V}, zh);
  return std::arg(sign * wh * std::conj(zh));
}

struct PathRecord {
  double zn = 0.0, wn = 0.0;  // |Z(T)|, |W(T)|
  MartingaleState final;
  double ruv = 0.0, rxy = 0.0;
  double qz = 0.0, qw = 0.0;
};

PathRecord simulate_path(const MartingaleStrategy& s, const McOptions& opt, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dt = opt.t_final / opt.n_steps;
  const double fine_sd = std::sqrt(dt / opt.refine);

  PathRecord rec;
  StepContext ctx;
  ctx.n_steps = opt.n_steps;
  ctx.dt = dt;
  ctx.state = s.initial;
  for (int step = 0; step < opt.n_steps; ++step) {
    ctx.step = step;
    ctx.t = step * dt;
    const IncrementFrame f = s.rule(ctx);
    if (const std::string why = frame_violation(f, s.constraints); !why.empty()) {
      throw ConstraintViolation(
          fmt::format("strategy '{}' produced an invalid frame at step {} of path {}: {}", s.name, step, index, why));
    }
    double b1 = 0.0, b2 = 0.0;
    for (int j = 0; j < opt.refine; ++j) {
      b1 += fine_sd * normal(rng);
      b2 += fine_sd * normal(rng);
    }
    const double dX = f.h[0] * b1 + f.h[1] * b2;
    const double dY = f.h2[0] * b1 + f.h2[1] * b2;
    const double dU = f.k[0] * b1 + f.k[1] * b2;
    const double dV = f.k2[0] * b1 + f.k2[1] * b2;
    MartingaleState& st = ctx.state;
    st.X += dX;
    st.Y += dY;
    st.U += dU;
    st.V += dV;
    rec.ruv += dU * dV;
    rec.rxy += dX * dY;
    rec.qz += (norm2(f.h) + norm2(f.h2)) * dt;
    rec.qw += (norm2(f.k) + norm2(f.k2)) * dt;
    if (!std::isfinite(st.X + st.Y + st.U + st.V)) {
      throw NumericalFailure(fmt::format("strategy '{}': non-finite state at step {} of path {}", s.name, step, index));
    }
  }
  rec.final = ctx.state;
  rec.zn = std::hypot(ctx.state.X, ctx.state.Y);
  rec.wn = std::hypot(ctx.state.U, ctx.state.V);
  return rec;
}

std::vector<PathRecord> simulate(const MartingaleStrategy& s, const McOptions& opt) {
  if (opt.n_paths < 1 || opt.n_steps < 1 || !(opt.t_final > 0.0) || opt.refine < 1 || opt.batches < 2) {
    throw std::invalid_argument("run_mc: n_paths, n_steps, refine, t_final must be positive and batches >= 2");
  }
  if (opt.n_paths < kMinPaths || opt.n_paths < opt.batches) {
    throw std::invalid_argument(
        fmt::format("run_mc: need at least {} paths, got {}", std::max(kMinPaths, opt.batches), opt.n_paths));
  }
  if (!s.rule) throw std::invalid_argument("run_mc: strategy has no rule");
  std::vector<PathRecord> out(opt.n_paths);
  const int workers = std::min(resolve_threads(opt.threads), opt.n_paths);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](int w) {
    try {
      const long lo = static_cast<long>(opt.n_paths) * w / workers;
      const long hi = static_cast<long>(opt.n_paths) * (w + 1) / workers;
      for (long i = lo; i < hi; ++i) out[i] = simulate_path(s, opt, static_cast<std::uint64_t>(i));
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Batch means over contiguous blocks of paths, in path order.
struct BatchStats {
  std::vector<double> means;
  double mean = 0.0;
};

BatchStats batch(const std::vector<double>& v, int batches) {
  BatchStats b;
  b.means.assign(batches, 0.0);
  std::vector<long> counts(batches, 0);
  const long n = static_cast<long>(v.size());
  CompensatedSum<double> total;
  for (long i = 0; i < n; ++i) {
    const int k = static_cast<int>(i * batches / n);
    b.means[k] += v[i];
    ++counts[k];
    total.add(v[i]);
  }
  for (int k = 0; k < batches; ++k) b.means[k] /= counts[k];
  b.mean = total.value() / n;
  return b;
}

// Covariance of the grand means estimated from batch means.
double batch_cov(const BatchStats& a, const BatchStats& b) {
  const int k = static_cast<int>(a.means.size());
  double ma = 0.0, mb = 0.0;
  for (int i = 0; i < k; ++i) {
    ma += a.means[i];
    mb += b.means[i];
  }
  ma /= k;
  mb /= k;
  double c = 0.0;
  for (int i = 0; i < k; ++i) c += (a.means[i] - ma) * (b.means[i] - mb);
  return c / (k - 1) / k;
}

MeanEstimate mean_estimate(const std::vector<double>& v, int batches) {
  const BatchStats b = batch(v, batches);
  return {b.mean, std::sqrt(std::max(0.0, batch_cov(b, b)))};
}

double kurtosis(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
}

PathEstimate estimate(const std::string& name, double p, const std::vector<PathRecord>& recs, const McOptions& opt,
                      const std::vector<MeanEstimate>& terminal, const MeanEstimate& ruv, const MeanEstimate& rxy,
                      double max_qv) {
  std::vector<double> zp(recs.size()), wp(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    zp[i] = std::pow(recs[i].zn, p);
    wp[i] = std::pow(recs[i].wn, p);
  }
  const BatchStats bz = batch(zp, opt.batches);
  const BatchStats bw = batch(wp, opt.batches);
  PathEstimate e;
  e.strategy = name;
  e.p = p;
  e.n_paths = opt.n_paths;
  e.n_steps = opt.n_steps;
  e.t_final = opt.t_final;
  e.seed = opt.seed;
  e.est_Zp = bz.mean;
  e.est_Wp = bw.mean;
  const double vz = std::max(0.0, batch_cov(bz, bz));
  const double vw = std::max(0.0, batch_cov(bw, bw));
  const double czw = batch_cov(bz, bw);
  e.se_Zp = std::sqrt(vz);
  e.se_Wp = std::sqrt(vw);
  if (e.est_Zp > 0.0) {
    const double q = e.est_Wp / e.est_Zp;
    e.ratio = std::pow(q, 1.0 / p);
    // Delta method: Var(q) from the batch covariance of (Wbar, Zbar).
    const double z = e.est_Zp, w = e.est_Wp;
    const double var_q = std::max(0.0, vw / (z * z) + w * w * vz / (z * z * z * z) - 2.0 * w * czw / (z * z * z));
    e.se = q > 0.0 ? std::pow(q, 1.0 / p - 1.0) / p * std::sqrt(var_q) : std::sqrt(std::sqrt(var_q));
  } else {
    e.ratio = std::numeric_limits<double>::quiet_NaN();
    e.se = std::numeric_limits<double>::quiet_NaN();
  }
  e.kurtosis_proxy = std::max(kurtosis(zp), kurtosis(wp));
  e.heavy_tail_warning = e.kurtosis_proxy > opt.kurtosis_warn;
  e.X = terminal[0];
  e.Y = terminal[1];
  e.U = terminal[2];
  e.V = terminal[3];
  e.realized_uv = ruv;
  e.realized_xy = rxy;
  e.max_qv_ratio = max_qv;
  return e;
}

}  // namespace

std::string frame_violation(const IncrementFrame& f, const FrameConstraints& c, double tol) {
  const double sz = norm2(f.h) + norm2(f.h2);
  const double sw = norm2(f.k) + norm2(f.k2);
  if (!std::isfinite(sz + sw)) return "non-finite entries";
  if (c.z_orthogonal) {
    if (std::abs(dot(f.h, f.h2)) > tol * sz) return fmt::format("x.y = {} (Z not orthogonal)", dot(f.h, f.h2));
    if (std::abs(norm2(f.h) - norm2(f.h2)) > tol * sz) return "|x| != |y| (Z not orthogonal)";
  }
  if (c.w_orthogonal) {
    if (std::abs(dot(f.k, f.k2)) > tol * sw) return fmt::format("u.v = {} (W not orthogonal)", dot(f.k, f.k2));
    if (std::abs(norm2(f.k) - norm2(f.k2)) > tol * sw) return "|u| != |v| (W not orthogonal)";
  }
  if (sw > c.subordination_factor * sz + tol * std::max(sz, sw)) {
    return fmt::format("|u|^2+|v|^2 = {} exceeds {} (|x|^2+|y|^2)", sw, c.subordination_factor);
  }
  return {};
}

MartingaleStrategy rotation_strategy(std::string name, AngleRule theta, AngleRule psi, AngleRule b, bool reflect,
                                     MartingaleState initial, double r) {
  MartingaleStrategy s;
  s.name = std::move(name);
  s.initial = initial;
  s.rule = [theta = std::move(theta), psi = std::move(psi), b = std::move(b), reflect, r](const StepContext& ctx) {
    const double t = theta(ctx), q = psi(ctx), bb = b(ctx);
    const double ct = std::cos(t), st = std::sin(t), cq = std::cos(q), sq = std::sin(q);
    IncrementFrame f;
    f.h = {r * ct, r * st};
    f.h2 = reflect ? Vec2{r * st, -r * ct} : Vec2{-r * st, r * ct};
    f.k = {bb * r * cq, bb * r * sq};
    f.k2 = {-bb * r * sq, bb * r * cq};
    return f;
  };
  return s;
}

void ab_rows(const Vec2& x, const Vec2& y, Vec2& u, Vec2& v) {
  u = {-x[0] - y[1], x[1] - y[0]};
  v = {x[1] - y[0], x[0] + y[1]};
}

MartingaleStrategy ab_transform_strategy(std::string name, std::function<IncrementFrame(const StepContext&)> z_rule,
                                         bool z_orthogonal, double scale, MartingaleState initial) {
  MartingaleStrategy s;
  s.name = std::move(name);
  s.initial = initial;
  s.constraints.z_orthogonal = z_orthogonal;
  s.constraints.w_orthogonal = true;
  s.constraints.subordination_factor = 4.0 * scale * scale;
  s.in_bound_set = z_orthogonal && s.constraints.subordination_factor <= 1.0;
  s.rule = [z_rule = std::move(z_rule), scale](const StepContext& ctx) {
    IncrementFrame f = z_rule(ctx);
    ab_rows(f.h, f.h2, f.k, f.k2);
    for (double* e : {&f.k[0], &f.k[1], &f.k2[0], &f.k2[1]}) *e *= scale;
    return f;
  };
  return s;
}

std::vector<std::string> strategy_names() {
  return {"identity", "rotation", "reflection", "half", "zero", "radial-switch", "greedy", "ab-orthogonal",
          "ab-general"};
}

std::vector<std::string> bound_set_names() {
  std::vector<std::string> out;
  for (const auto& n : strategy_names()) {
    if (make_strategy(n, 3.0).in_bound_set) out.push_back(n);
  }
  return out;
}

bool is_strategy_name(const std::string& name) {
  const auto names = strategy_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

MartingaleStrategy make_strategy(const std::string& name, double p) {
  auto constant = [](double v) -> AngleRule { return [v](const StepContext&) { return v; }; };
  const MartingaleState one{1.0, 0.0, 1.0, 0.0};
  if (name == "identity") return rotation_strategy(name, constant(0.0), constant(0.0), constant(1.0), false, one);
  if (name == "rotation") {
    return rotation_strategy(name, constant(0.0), constant(std::numbers::pi / 2), constant(1.0), false, one);
  }
  if (name == "reflection") {
    return rotation_strategy(name, constant(0.3), constant(0.3), constant(1.0), true, one);
  }
  if (name == "half") {
    return rotation_strategy(name, constant(0.0), constant(1.0), constant(0.5), false, {1.0, 0.0, 0.5, 0.0});
  }
  if (name == "zero") {
    return rotation_strategy(name, constant(0.0), constant(0.0), constant(0.0), false, {1.0, 0.0, 0.0, 0.0});
  }
  if (name == "radial-switch") {
    // Push |W| against |Z| while |W| <= |Z|, along with it otherwise.
    AngleRule psi = [](const StepContext& c) {
      const bool behind = std::hypot(c.state.U, c.state.V) <= std::hypot(c.state.X, c.state.Y);
      return -radial_delta(c.state, behind ? -1.0 : 1.0);
    };
    return rotation_strategy(name, constant(0.0), psi, constant(1.0), false, one);
  }
  if (name == "greedy") {
    // Pushes |W| against |Z| (anti-aligned radial increments) while
    // |W| < c_p |Z|, then rides along with Z.
    const double cp = sharp_cp(p);
    AngleRule psi = [cp](const StepContext& c) {
      const bool ahead = std::hypot(c.state.U, c.state.V) >= cp * std::hypot(c.state.X, c.state.Y);
      return -radial_delta(c.state, ahead ? 1.0 : -1.0);
    };
    return rotation_strategy(name, constant(0.0), psi, constant(1.0), false, one);
  }
  if (name == "ab-orthogonal") {
    // Conformal Z with a path-dependent rotation; W = (A*Z)/2.
    auto z_rule = [](const StepContext& c) {
      const double t = std::atan2(c.state.Y, c.state.X);
      IncrementFrame f;
      f.h = {std::cos(t), std::sin(t)};
      f.h2 = {-std::sin(t), std::cos(t)};
      return f;
    };
    return ab_transform_strategy(name, z_rule, true, 0.5, {1.0, 0.0, 0.0, 0.0});
  }
  if (name == "ab-general") {
    // Z rows of unequal length and varying angle; W = A*Z unscaled.
    auto z_rule = [](const StepContext& c) {
      const double t = std::atan2(c.state.Y, c.state.X) + 1.0;
      IncrementFrame f;
      f.h = {1.0, 0.0};
      f.h2 = {0.5 * std::cos(t), 0.5 * std::sin(t)};
      return f;
    };
    return ab_transform_strategy(name, z_rule, false, 1.0, {1.0, 0.0, 0.0, 0.0});
  }
  throw std::invalid_argument(fmt::format("unknown strategy '{}'", name));
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("SHARP_MTG_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

std::vector<PathEstimate> run_mc_multi(const MartingaleStrategy& s, std::span<const double> p_list,
                                       const McOptions& opt) {
  for (double p : p_list) {
    if (!(p >= 1.0)) throw std::invalid_argument(fmt::format("run_mc: p = {} must be at least 1", p));
  }
  const std::vector<PathRecord> recs = simulate(s, opt);
  const std::size_t n = recs.size();
  std::vector<double> col(n);
  auto column = [&](auto get) {
    for (std::size_t i = 0; i < n; ++i) col[i] = get(recs[i]);
    return mean_estimate(col, opt.batches);
  };
  const std::vector<MeanEstimate> terminal{column([](const PathRecord& r) { return r.final.X; }),
                                           column([](const PathRecord& r) { return r.final.Y; }),
                                           column([](const PathRecord& r) { return r.final.U; }),
                                           column([](const PathRecord& r) { return r.final.V; })};
  const MeanEstimate ruv = column([](const PathRecord& r) { return r.ruv; });
  const MeanEstimate rxy = column([](const PathRecord& r) { return r.rxy; });
  double max_qv = -std::numeric_limits<double>::infinity();
  for (const auto& r : recs) {
    if (r.qz > 0.0) {
      max_qv = std::max(max_qv, r.qw / r.qz);
    } else if (r.qw > 0.0) {
      max_qv = std::numeric_limits<double>::infinity();
    }
  }
  if (max_qv == -std::numeric_limits<double>::infinity()) max_qv = std::numeric_limits<double>::quiet_NaN();

  std::vector<PathEstimate> out;
  for (double p : p_list) {
    out.push_back(estimate(s.name, p, recs, opt, terminal, ruv, rxy, max_qv));
  }
  return out;
}

PathEstimate run_mc(const MartingaleStrategy& s, double p, const McOptions& opt) {
  const double ps[] = {p};
  return run_mc_multi(s, ps, opt).front();
}

void write_csv_header(std::ostream& out) { out << "strategy,p,n_paths,n_steps,seed,est_Zp,est_Wp,ratio,se\n"; }

void write_csv_row(const PathEstimate& e, std::ostream& out) {
  out << fmt::format("{},{},{},{},{},{},{},{},{}\n", e.strategy, format_g15(e.p), e.n_paths, e.n_steps, e.seed,
                     format_g15(e.est_Zp), format_g15(e.est_Wp), format_g15(e.ratio), format_g15(e.se));
}

}  // namespace sharpmtg::mc
