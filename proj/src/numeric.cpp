#include "sharpmtg/numeric.hpp"

#include <charconv>
#include <numbers>

#include <fmt/format.h>

namespace sharpmtg {

std::string format_g15(double x) { return fmt::format("{:.15g}", x); }

double round_sig15(double x) {
  if (!std::isfinite(x)) return x;
  const std::string text = format_g15(x);
  double out = x;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

}  // namespace sharpmtg

namespace sharpmtg {

QuadratureRule gauss_legendre_rule(int n) {
  if (n < 1) throw std::domain_error("gauss_legendre_rule: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    long double dp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1.0L;
      long double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0L, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0L);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = static_cast<double>(x);
    rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(2.0L / ((1.0L - x * x) * dp * dp));
  }
  return rule;
}

QuadratureResult integrate_composite_gl(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                        int max_panels) {
  static const QuadratureRule rule = gauss_legendre_rule(20);
  auto composite = [&](int panels) {
    CompensatedSum<double> sum;
    const double width = (b - a) / panels;
    for (int j = 0; j < panels; ++j) {
      const double left = a + width * j;
      const double mid = left + 0.5 * width;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum.add(0.5 * width * rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]));
      }
    }
    return sum.value();
  };
  QuadratureResult out;
  double previous = composite(1);
  for (int panels = 2; panels <= max_panels; panels *= 2) {
    const double current = composite(panels);
    const double diff = std::abs(current - previous);
    if (diff <= rel_tol * std::max(1.0, std::abs(current))) {
      out.value = current;
      out.error = diff;
      out.panels = panels;
      return out;
    }
    previous = current;
  }
  throw NumericalFailure("integrate_composite_gl: no convergence within the panel budget");
}

}  // namespace sharpmtg
