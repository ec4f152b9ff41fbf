#include "sharpmtg/rodrigues.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace sharpmtg {
namespace {

__int128 checked_mul(__int128 a, __int128 b) {
  __int128 out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("rodrigues: 128-bit overflow");
  return out;
}

__int128 checked_add(__int128 a, __int128 b) {
  __int128 out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("rodrigues: 128-bit overflow");
  return out;
}

__int128 abs128(__int128 v) { return v < 0 ? -v : v; }

__int128 gcd128(__int128 a, __int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Binomial coefficient by the multiplicative formula; every partial product
// C(n, i) is an integer, so the division is exact.
__int128 binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __int128 out = 1;
  for (int i = 1; i <= k; ++i) out = checked_mul(out, n - k + i) / i;
  return out;
}

std::string int128_to_string(__int128 v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  std::string digits;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  while (u > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  return neg ? "-" + digits : digits;
}

}  // namespace

Fraction make_fraction(__int128 num, __int128 den) {
  if (den == 0) throw std::domain_error("fraction with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) den = 1;
  return {num, den};
}

double Fraction::to_double() const { return static_cast<double>(to_long_double()); }

long double Fraction::to_long_double() const {
  return static_cast<long double>(num) / static_cast<long double>(den);
}

std::string Fraction::to_string() const {
  if (den == 1) return int128_to_string(num);
  return int128_to_string(num) + "/" + int128_to_string(den);
}

RodriguesPolynomial::RodriguesPolynomial(int degree) : degree_(degree) {
  if (degree < 1 || degree > max_degree) {
    throw std::domain_error(fmt::format("rodrigues_polynomial: degree {} outside [1, {}]", degree, max_degree));
  }
  const int n = degree;
  // (s^2 - 1)^n = sum_j C(n, j) (-1)^(n-j) s^(2j). The n-th derivative of s^(2j)
  // is (2j)!/(2j-n)! s^(2j-n); dividing by n! leaves C(2j, n). The remaining
  // factor 1/2^n becomes the common denominator.
  std::vector<__int128> numerators(static_cast<std::size_t>(n) + 1, 0);
  for (int j = 0; j <= n; ++j) {
    if (2 * j < n) continue;
    const __int128 sign = ((n - j) % 2 == 0) ? 1 : -1;
    const __int128 term = checked_mul(checked_mul(binomial(n, j), binomial(2 * j, n)), sign);
    auto& slot = numerators[static_cast<std::size_t>(2 * j - n)];
    slot = checked_add(slot, term);
  }
  const __int128 denominator = static_cast<__int128>(1) << n;
  coeffs_.reserve(numerators.size());
  for (const __int128 c : numerators) coeffs_.push_back(make_fraction(c, denominator));
}

double RodriguesPolynomial::operator()(double s) const {
  long double acc = 0.0L;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + it->to_long_double();
  return static_cast<double>(acc);
}

double RodriguesPolynomial::derivative(double s) const {
  long double acc = 0.0L;
  for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) {
    acc = acc * s + static_cast<long double>(k) * coeffs_[k].to_long_double();
  }
  return static_cast<double>(acc);
}

}  // namespace sharpmtg
