#ifndef SHARPMTG_NUMERIC_HPP
#define SHARPMTG_NUMERIC_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sharpmtg {

/// Raised when an iterative method (series, quadrature, integrator, root
/// bracketing) cannot meet its tolerance. Never returned as a silent value.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier's variant of Kahan summation.
template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_ = 0;
  T comp_ = 0;
};

struct QuadratureRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton iteration on the three-term recurrence).
QuadratureRule gauss_legendre_rule(int n);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

/// Composite 20-point Gauss-Legendre on [a, b]; the panel count doubles until
/// two successive estimates agree to rel_tol * max(1, |value|). Throws
/// NumericalFailure when max_panels is reached first.
QuadratureResult integrate_composite_gl(const std::function<double(double)>& f, double a, double b,
                                        double rel_tol = 1e-14, int max_panels = 1024);

/// Rounds to 15 significant decimal digits (the output precision of every
/// report); locale-independent.
double round_sig15(double x);

/// Formats with 15 significant digits, locale-independent.
std::string format_g15(double x);

}  // namespace sharpmtg

#endif
