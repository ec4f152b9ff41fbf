#include "sharpmtg/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "sharpmtg/numeric.hpp"
#include "sharpmtg/ode.hpp"

namespace sharpmtg {
namespace {

// Threshold for the precomputed coefficient list: terms a_n 1.5^n (the worst
// series point s = -0.5) below this fraction of the largest one are dropped.
constexpr long double kCoefficientFloor = 1e-22L;

// Largest (1 - s)/2 times p for which the series is summed directly; beyond it
// the terms grow large enough to cost digits, so f1 is continued by Taylor steps.
constexpr double kSeriesReach = 24.0;

constexpr long double kTaylorTol = 1e-19L;
constexpr int kTaylorMaxTerms = 2000;

// One Taylor step of the Legendre equation about the ordinary point s0:
// with y = sum c_k h^k,
//   c_{k+2} = (2 s0 (k+1)^2 c_{k+1} + (k(k+1) - p) c_k) / ((1 - s0^2)(k+1)(k+2)).
Jet taylor_step(long double p, long double s0, long double y, long double dy, long double h) {
  const long double a = (1.0L - s0) * (1.0L + s0);
  long double ck = y;
  long double ck1 = dy;
  CompensatedSum<long double> val, d1, d2;
  val.add(y);
  val.add(dy * h);
  d1.add(dy);
  long double hm2 = 1.0L;  // h^(m-2)
  int small_run = 0;
  for (int k = 0; k < kTaylorMaxTerms; ++k) {
    const long double kk = k;
    const long double ck2 = (2.0L * s0 * (kk + 1) * (kk + 1) * ck1 + (kk * (kk + 1) - p) * ck) / (a * (kk + 1) * (kk + 2));
    const long double m = kk + 2;
    const long double t2 = m * (m - 1) * ck2 * hm2;
    const long double t1 = m * ck2 * hm2 * h;
    const long double t0 = ck2 * hm2 * h * h;
    val.add(t0);
    d1.add(t1);
    d2.add(t2);
    const long double scale =
        std::max({std::abs(val.value()), std::abs(d1.value() * h), std::abs(d2.value() * h * h), 1e-300L});
    const long double biggest = std::max({std::abs(t0), std::abs(t1 * h), std::abs(t2 * h * h)});
    small_run = (m >= 4 && biggest <= kTaylorTol * scale) ? small_run + 1 : 0;
    if (small_run >= 3) {
      return {static_cast<double>(val.value()), static_cast<double>(d1.value()), static_cast<double>(d2.value())};
    }
    ck = ck1;
    ck1 = ck2;
    hm2 *= h;
  }
  throw NumericalFailure(fmt::format("legendre: Taylor step at s0={} h={} did not converge", static_cast<double>(s0),
                                     static_cast<double>(h)));
}

}  // namespace

double alpha_from_p(double p) {
  if (!(p >= 2.0) || !std::isfinite(p)) {
    throw std::domain_error(fmt::format("alpha_from_p: p = {} is outside [2, inf)", p));
  }
  return 2.0 * p / (std::sqrt(1.0 + 4.0 * p) + 1.0);
}

LegendreSolution::LegendreSolution(double p, LegendreOptions opts) : p_(p), alpha_(alpha_from_p(p)), opts_(opts) {
  if (!(opts_.trunc_tol > 0.0) || opts_.max_terms < 3 || !(opts_.radius_guard > 0.0)) {
    throw std::invalid_argument("LegendreSolution: invalid options");
  }
  coeffs_.reserve(256);
  coeffs_.push_back(1.0L);
  const long double pl = p_;
  long double biggest = 1.0L;
  long double pow15 = 1.0L;
  int small_run = 0;
  for (int n = 1; n <= opts_.max_terms; ++n) {
    const long double nl = n;
    const long double a = coeffs_.back() * (pl - nl * (nl - 1)) / (2.0L * nl * nl);
    if (a == 0.0L) {
      terminating_ = true;
      break;
    }
    coeffs_.push_back(a);
    pow15 *= 1.5L;
    const long double mag = std::abs(a) * pow15;
    biggest = std::max(biggest, mag);
    small_run = (nl * (nl + 1) > pl && mag <= kCoefficientFloor * biggest) ? small_run + 1 : 0;
    if (small_run >= 3) break;
  }
  series_lower_ = std::max(opts_.series_min_s, 1.0 - 2.0 * kSeriesReach / p_);
  f2_base_ = 1.0 - 1.0 / p_;

  // f2 on [f2_base_, 1) by quadrature; f1 >= 1/2 there because f1 lies above
  // its tangent 1 - (p/2)(1 - s) at s = 1 on [z_p, 1].
  const Jet f1 = jet(f2_base_);
  const double v = -std::log1p(-f2_base_) - log_remainder(f2_base_);
  const double one_minus_s2 = (1.0 - f2_base_) * (1.0 + f2_base_);
  f2_at_base_.value = f1.value * v;
  f2_at_base_.d1 = f1.d1 * v + 2.0 / (one_minus_s2 * f1.value);
  f2_at_base_.d2 = second_derivative_from_ode(p_, f2_base_, f2_at_base_.value, f2_at_base_.d1);
}

LegendreSolution LegendreSolution::from_alpha(double alpha, LegendreOptions opts) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    throw std::domain_error(fmt::format("LegendreSolution: degree {} is below 1", alpha));
  }
  return LegendreSolution(alpha * (alpha + 1.0), opts);
}

std::string LegendreSolution::coefficients_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t n = 0; n < coeffs_.size(); ++n) {
    out.push_back({{"n", n}, {"a_n", round_sig15(static_cast<double>(coeffs_[n]))}});
  }
  return out.dump();
}

void LegendreSolution::check_domain(double s, bool allow_one) const {
  const bool upper_ok = allow_one ? s <= 1.0 : s < 1.0;
  if (!(s >= -1.0 + opts_.radius_guard) || !upper_ok) {
    throw std::domain_error(fmt::format("legendre: s = {} outside the evaluation range", s));
  }
}

LegendreSolution::SeriesSums LegendreSolution::sum_series(long double u, bool derivatives, bool tail_relative) const {
  const long double q = std::abs(u) / 2.0L;
  const long double pl = p_;
  const long double tol = tail_relative ? 1e-18L : static_cast<long double>(opts_.trunc_tol);
  CompensatedSum<long double> tail, d1, d2;
  long double un1 = 1.0L;  // u^(n-1)
  long double un2 = 0.0L;  // u^(n-2)
  int small_run = 0;
  SeriesSums out;
  for (std::size_t n = 1; n < coeffs_.size(); ++n) {
    const long double nl = static_cast<long double>(n);
    const long double a = coeffs_[n];
    const long double t0 = a * un1 * u;
    tail.add(t0);
    long double t1 = 0.0L;
    long double t2 = 0.0L;
    if (derivatives) {
      t1 = nl * a * un1;
      d1.add(t1);
      if (n >= 2) {
        t2 = nl * (nl - 1) * a * un2;
        d2.add(t2);
      }
    }
    un2 = un1;
    un1 *= u;

    if (nl * (nl + 1) <= pl) continue;
    const long double q1 = q * (nl + 1) / nl;
    const long double q2 = n >= 2 ? q * (nl + 1) / (nl - 1) : 1.0L;
    const long double sv =
        tail_relative ? std::max(std::abs(tail.value()), 1e-300L) : std::max(1.0L, std::abs(1.0L + tail.value()));
    const long double e0 = std::abs(t0) * q / (1.0L - q);
    bool small = std::abs(t0) <= tol * sv && e0 <= tol * sv;
    long double e1 = 0.0L;
    long double e2 = 0.0L;
    if (derivatives) {
      const long double s1 = std::max(1.0L, std::abs(d1.value()));
      const long double s2 = std::max(1.0L, std::abs(d2.value()));
      e1 = q1 < 1.0L ? std::abs(t1) * q1 / (1.0L - q1) : HUGE_VALL;
      e2 = q2 < 1.0L ? std::abs(t2) * q2 / (1.0L - q2) : HUGE_VALL;
      small = small && std::abs(t1) <= tol * s1 && e1 <= tol * s1 && std::abs(t2) <= tol * s2 && e2 <= tol * s2;
    }
    small_run = small ? small_run + 1 : 0;
    if (small_run >= 3) {
      out.tail = tail.value();
      out.d1 = d1.value();
      out.d2 = d2.value();
      out.terms = static_cast<int>(n) + 1;
      out.est_error = static_cast<double>(e0);
      return out;
    }
  }
  if (terminating_) {
    out.tail = tail.value();
    out.d1 = d1.value();
    out.d2 = d2.value();
    out.terms = static_cast<int>(coeffs_.size());
    out.est_error = 0.0;
    return out;
  }
  throw NumericalFailure(
      fmt::format("legendre: series for p={} at s={} did not meet tolerance within {} terms", p_,
                  static_cast<double>(1.0L + u), coeffs_.size()));
}

SeriesEvalReport LegendreSolution::series(double s) const {
  check_domain(s, true);
  if (s < series_lower_) {
    throw std::domain_error(fmt::format("legendre: s = {} is below the series trust limit {}", s, series_lower_));
  }
  const SeriesSums sums = sum_series(static_cast<long double>(s) - 1.0L, false);
  return {static_cast<double>(1.0L + sums.tail), sums.terms, sums.est_error};
}

Jet LegendreSolution::jet(double s) const {
  check_domain(s, true);
  if (s == 1.0) return {1.0, p_ / 2.0, p_ * (p_ - 2.0) / 8.0};
  if (s >= series_lower_) {
    const SeriesSums sums = sum_series(static_cast<long double>(s) - 1.0L, true);
    return {static_cast<double>(1.0L + sums.tail), static_cast<double>(sums.d1), static_cast<double>(sums.d2)};
  }
  return continue_from(series_lower_, jet(series_lower_), s);
}

Jet LegendreSolution::continue_from(double s0, Jet start, double s_target) const {
  long double s = s0;
  Jet cur = start;
  const long double target = s_target;
  for (int step = 0; step < 100000; ++step) {
    const long double remaining = target - s;
    if (remaining == 0.0L) return cur;
    const long double rho = 1.0L - std::abs(s);
    const long double omega = std::sqrt(static_cast<long double>(p_) / ((1.0L - s) * (1.0L + s)) + 1.0L);
    long double h = std::min({std::abs(remaining), rho / 2.0L, 4.0L / omega});
    if (h >= std::abs(remaining)) h = std::abs(remaining);
    h = remaining > 0 ? h : -h;
    cur = taylor_step(p_, s, cur.value, cur.d1, h);
    s = (h == remaining) ? target : s + h;
  }
  throw NumericalFailure(fmt::format("legendre: continuation to s={} did not terminate", s_target));
}

double LegendreSolution::log_remainder(double s) const {
  if (s >= 1.0) return 0.0;
  // r(u) = 2/((1-u^2) f1^2) - 1/(1-u), written with w = f1 - 1 so that the
  // O(1-u) cancellation near u = 1 happens analytically. The integration
  // variable is delta = 1 - u, exact near the endpoint.
  auto integrand = [this](double delta) {
    const long double d = delta;
    const SeriesSums sums = sum_series(-d, false, true);
    const long double w = sums.tail;
    const long double f1 = 1.0L + w;
    if (!(f1 > 0.0L)) {
      throw NumericalFailure(fmt::format("legendre: f2 quadrature reached a zero of f1 near u={}", 1.0 - delta));
    }
    const long double num = d * f1 * f1 - 2.0L * w * (2.0L + w);
    const long double den = d * (2.0L - d) * f1 * f1;
    return static_cast<double>(num / den);
  };
  return integrate_composite_gl(integrand, 0.0, 1.0 - s, 1e-14).value;
}

Jet LegendreSolution::second_jet(double s) const {
  check_domain(s, false);
  if (s < f2_base_) return continue_from(f2_base_, f2_at_base_, s);
  const Jet f1 = jet(s);
  const double v = -std::log1p(-s) - log_remainder(s);
  const double one_minus_s2 = (1.0 - s) * (1.0 + s);
  Jet out;
  out.value = f1.value * v;
  out.d1 = f1.d1 * v + 2.0 / (one_minus_s2 * f1.value);
  out.d2 = second_derivative_from_ode(p_, s, out.value, out.d1);
  return out;
}

double LegendreSolution::wronskian(double s) const {
  const Jet f1 = jet(s);
  const Jet f2 = second_jet(s);
  return f1.value * f2.d1 - f1.d1 * f2.value;
}

double legendre_f1(const LegendreSolution& sol, double s) { return sol.value(s); }

double legendre_f2(const LegendreSolution& sol, double s) { return sol.second_value(s); }

double second_derivative_from_ode(double p, double s, double value, double d1) {
  if (!(std::abs(s) < 1.0)) throw std::domain_error("second_derivative_from_ode: |s| must be < 1");
  return (2.0 * s * d1 - p * value) / ((1.0 - s) * (1.0 + s));
}

double legendre_f1_ode_oracle(double alpha, double s_target, double step) {
  if (!(s_target > -1.0 && s_target < 1.0)) {
    throw std::domain_error(fmt::format("legendre_f1_ode_oracle: s = {} outside (-1, 1)", s_target));
  }
  if (!(step > 0.0)) throw std::domain_error("legendre_f1_ode_oracle: step must be positive");
  const LegendreSolution sol = LegendreSolution::from_alpha(alpha);
  const double p = sol.p();
  constexpr double s0 = 1.0 - 1e-3;
  const SeriesEvalReport start = sol.series(s0);
  const Jet start_jet = sol.jet(s0);
  ode::State<2> y{start.value, start_jet.d1};
  auto rhs = [p](double s, const ode::State<2>& st) -> ode::State<2> {
    return {st[1], (2.0 * s * st[1] - p * st[0]) / ((1.0 - s) * (1.0 + s))};
  };
  ode::AdaptiveOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  opt.initial_step = step;
  opt.min_step = 1e-15;
  return ode::integrate_dopri5<2>(rhs, s0, y, s_target, opt)[0];
}

}  // namespace sharpmtg
