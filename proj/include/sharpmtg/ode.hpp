#ifndef SHARPMTG_ODE_HPP
#define SHARPMTG_ODE_HPP

// Adaptive Dormand-Prince 5(4) integrator for small first-order systems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fmt/format.h>

#include "sharpmtg/numeric.hpp"

namespace sharpmtg::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct AdaptiveOptions {
  double rtol = 1e-12;
  double atol = 1e-13;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  std::size_t max_steps = 2'000'000;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

namespace detail {

template <std::size_t N>
State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
  State<N> out = y;
  for (const auto& [coef, k] : terms) {
    if (coef == 0.0) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
  }
  return out;
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t1 (either direction). Throws
/// NumericalFailure when the step size collapses below min_step or the step
/// budget is exhausted before reaching t1.
template <std::size_t N, class Rhs>
State<N> integrate_dopri5(Rhs&& rhs, double t0, State<N> y, double t1, const AdaptiveOptions& opt = {},
                          IntegrationStats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;
  if (t0 == t1) return y;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  double h = std::min(std::abs(opt.initial_step), std::abs(t1 - t0));
  State<N> k1 = rhs(t, y);

  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    const double remaining = std::abs(t1 - t);
    if (remaining <= 0.0) return y;
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    const double hs = dir * h;
    using detail::axpy;
    const State<N> k2 = rhs(t + c2 * hs, axpy<N>(y, hs, {{a21, &k1}}));
    const State<N> k3 = rhs(t + c3 * hs, axpy<N>(y, hs, {{a31, &k1}, {a32, &k2}}));
    const State<N> k4 = rhs(t + c4 * hs, axpy<N>(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State<N> k5 = rhs(t + c5 * hs, axpy<N>(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State<N> k6 =
        rhs(t + hs, axpy<N>(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State<N> y_new = axpy<N>(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State<N> k7 = rhs(t + hs, y_new);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(N));
    if (!std::isfinite(err)) {
      throw NumericalFailure(fmt::format("dopri5: non-finite error estimate at t={}", t));
    }

    if (err <= 1.0) {
      ++st.accepted;
      t = last ? t1 : t + hs;
      y = y_new;
      k1 = k7;
      if (last) return y;
    } else {
      ++st.rejected;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= err <= 1.0 ? factor : std::min(factor, 1.0);
    if (h < opt.min_step) {
      throw NumericalFailure(fmt::format("dopri5: step size underflow at t={} (h={})", t, h));
    }
  }
  throw NumericalFailure(fmt::format("dopri5: step budget exhausted before reaching t={}", t1));
}

}  // namespace sharpmtg::ode

#endif
