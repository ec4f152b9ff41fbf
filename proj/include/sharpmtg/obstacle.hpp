#ifndef SHARPMTG_OBSTACLE_HPP
#define SHARPMTG_OBSTACLE_HPP

#include <cmath>
#include <stdexcept>

#include "sharpmtg/legendre.hpp"

namespace sharpmtg {

/// h_c(s) = y^p - c^p x^p with y = (1+s)/2, x = (1-s)/2, on [-1, 1].
/// Powers of c are combined as (c x)^(p-k) c^k so that c^p alone never overflows.
struct Obstacle {
  double p;
  double c;

  Obstacle(double p_, double c_) : p(p_), c(c_) {
    if (!(p >= 2.0) || !(c > 0.0)) throw std::domain_error("Obstacle: need p >= 2 and c > 0");
  }

  // c^p x^(p-k)
  double weighted_x(double x, int k) const { return std::pow(c * x, p - k) * std::pow(c, k); }

  double value(double s) const {
    const double y = (1.0 + s) / 2.0, x = (1.0 - s) / 2.0;
    return std::pow(y, p) - weighted_x(x, 0);
  }
  double d1(double s) const {
    const double y = (1.0 + s) / 2.0, x = (1.0 - s) / 2.0;
    return p / 2.0 * (std::pow(y, p - 1.0) + weighted_x(x, 1));
  }
  double d2(double s) const {
    const double y = (1.0 + s) / 2.0, x = (1.0 - s) / 2.0;
    return p * (p - 1.0) / 4.0 * (std::pow(y, p - 2.0) - weighted_x(x, 2));
  }
  Jet jet(double s) const { return {value(s), d1(s), d2(s)}; }
};

}  // namespace sharpmtg

#endif
