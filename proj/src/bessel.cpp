#include "sharpmtg/bessel.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <fmt/format.h>

#include "sharpmtg/numeric.hpp"

namespace sharpmtg {
namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

// At x = 40 the largest term is ~2e15 while J0 is ~1e-2, so the terms are
// summed with 50 significant digits.
BesselJet series(double x) {
  if (!(x >= 0.0) || x > bessel_max_argument) {
    throw std::domain_error(fmt::format("bessel_j0: argument {} outside [0, {}]", x, bessel_max_argument));
  }
  const Wide xw = x;
  const Wide q = -(xw * xw) / 4;
  Wide term = 1;  // (-1)^n (x/2)^(2n) / (n!)^2
  Wide value = 1;
  Wide d1 = 0;
  Wide d2 = 0;
  const Wide cutoff = Wide("1e-45");
  for (int n = 1; n < 500; ++n) {
    term *= q / (Wide(n) * n);
    value += term;
    // d/dx x^(2n) = 2n x^(2n-1); the x powers are restored below.
    d1 += term * (2 * n);
    d2 += term * (2 * n) * (2 * n - 1);
    if (n > x && abs(term) * (4 * n * n + 1) < cutoff) {
      const double v = value.convert_to<double>();
      const double first = x == 0.0 ? 0.0 : (d1 / xw).convert_to<double>();
      const double second = x == 0.0 ? -0.5 : (d2 / (xw * xw)).convert_to<double>();
      return {v, first, second};
    }
  }
  throw NumericalFailure(fmt::format("bessel_j0: series did not converge at x={}", x));
}

}  // namespace

double bessel_j0(double x) { return series(x).value; }

BesselJet bessel_j0_jet(double x) { return series(x); }

double find_j0() {
  double lo = 0.0;
  double hi = 0.0;
  bool found = false;
  for (double x = 0.25; x <= bessel_max_argument; x += 0.25) {
    if (bessel_j0(x) <= 0.0) {
      lo = x - 0.25;
      hi = x;
      found = true;
      break;
    }
  }
  if (!found) throw NumericalFailure("find_j0: no sign change found");
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (bessel_j0(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace sharpmtg
