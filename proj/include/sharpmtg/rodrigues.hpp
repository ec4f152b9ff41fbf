#ifndef SHARPMTG_RODRIGUES_HPP
#define SHARPMTG_RODRIGUES_HPP

#include <string>
#include <vector>

namespace sharpmtg {

/// Exact rational number with 128-bit numerator and denominator, kept reduced.
struct Fraction {
  __int128 num = 0;
  __int128 den = 1;

  double to_double() const;
  long double to_long_double() const;
  std::string to_string() const;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

Fraction make_fraction(__int128 num, __int128 den);

/// Legendre polynomial obtained from the Rodrigues formula
/// L_n(s) = 1/(2^n n!) d^n/ds^n (s^2 - 1)^n, with exact coefficients.
class RodriguesPolynomial {
 public:
  static constexpr int max_degree = 30;

  explicit RodriguesPolynomial(int degree);

  int degree() const { return degree_; }
  /// coefficients()[k] multiplies s^k.
  const std::vector<Fraction>& coefficients() const { return coeffs_; }
  double operator()(double s) const;
  double derivative(double s) const;

 private:
  int degree_;
  std::vector<Fraction> coeffs_;
};

/// Convenience wrapper matching the operation name used in reports.
inline RodriguesPolynomial rodrigues_polynomial(int n) { return RodriguesPolynomial(n); }

}  // namespace sharpmtg

#endif
