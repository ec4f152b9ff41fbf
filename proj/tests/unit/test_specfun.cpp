#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "sharpmtg/bessel.hpp"
#include "sharpmtg/legendre.hpp"
#include "sharpmtg/numeric.hpp"
#include "sharpmtg/rodrigues.hpp"

using namespace sharpmtg;

namespace {

// Residual of (1 - s^2) y'' - 2 s y' + p y, scaled by the size of its terms.
double legendre_residual(double p, double s, const Jet& j) {
  const double a = (1.0 - s * s) * j.d2;
  const double b = 2.0 * s * j.d1;
  const double c = p * j.value;
  return std::abs(a - b + c) / (1.0 + std::abs(a) + std::abs(b) + std::abs(c));
}

// Harmonic number, used by the f2 normalization for integer degree.
double harmonic(int n) {
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  return h;
}

}  // namespace

TEST_CASE("rodrigues coefficients are exact") {
  const RodriguesPolynomial l2(2);
  REQUIRE(l2.coefficients().size() == 3);
  CHECK(l2.coefficients()[0] == make_fraction(-1, 2));
  CHECK(l2.coefficients()[1] == make_fraction(0, 1));
  CHECK(l2.coefficients()[2] == make_fraction(3, 2));

  const RodriguesPolynomial l3(3);
  CHECK(l3.coefficients()[1] == make_fraction(-3, 2));
  CHECK(l3.coefficients()[3] == make_fraction(5, 2));

  CHECK_THROWS_AS(RodriguesPolynomial(0), std::domain_error);
  CHECK_THROWS_AS(RodriguesPolynomial(RodriguesPolynomial::max_degree + 1), std::domain_error);
}

TEST_CASE("rodrigues agrees with the library Legendre polynomials") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 1; n <= 12; ++n) {
    const RodriguesPolynomial L(n);
    CHECK(L(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 0; i < 50; ++i) {
      const double s = u(rng);
      CHECK(std::abs(L(s) - std::legendre(n, s)) < 1e-13);
    }
  }
}

TEST_CASE("f1 reduces to the Rodrigues polynomial for integer degree") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 1; n <= 8; ++n) {
    const LegendreSolution sol = LegendreSolution::from_alpha(n);
    const RodriguesPolynomial L(n);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double s = u(rng);
      worst = std::max(worst, std::abs(legendre_f1(sol, s) - L(s)));
    }
    INFO("n = " << n);
    CHECK(worst < 1e-12);
    CHECK(legendre_f1(sol, 1.0) == 1.0);
  }
}

TEST_CASE("f1 matches the hypergeometric representation for fractional degree") {
  // f1(s) = 2F1(-alpha, alpha + 1; 1; (1 - s) / 2)
  for (double alpha : {1.5, 2.7, 4.3, 6.1}) {
    const LegendreSolution sol = LegendreSolution::from_alpha(alpha);
    for (double s = -0.9; s < 1.0; s += 0.05) {
      const double ref =
          boost::math::hypergeometric_pFq({-alpha, alpha + 1.0}, {1.0}, (1.0 - s) / 2.0);
      INFO("alpha = " << alpha << ", s = " << s);
      CHECK(std::abs(legendre_f1(sol, s) - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("f1 series agrees with direct ODE integration") {
  for (double alpha : {1.5, 2.0, 2.7, 3.0, 4.3}) {
    const LegendreSolution sol = LegendreSolution::from_alpha(alpha);
    double worst = 0.0;
    for (int i = 0; i <= 60; ++i) {
      const double s = -0.9 + (0.999 + 0.9) * i / 60.0;
      worst = std::max(worst, std::abs(legendre_f1(sol, s) - legendre_f1_ode_oracle(alpha, s, 1e-4)));
    }
    INFO("alpha = " << alpha);
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("f1 and f2 solve the Legendre equation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.999, 0.999);
  for (double p : {2.0, 2.5, 6.0, 7.5, 12.0, 30.0, 200.0}) {
    const LegendreSolution sol(p);
    for (int i = 0; i < 100; ++i) {
      const double s = u(rng);
      INFO("p = " << p << ", s = " << s);
      CHECK(legendre_residual(p, s, sol.jet(s)) < 1e-9);
      CHECK(legendre_residual(p, s, sol.second_jet(s)) < 1e-9);
    }
  }
}

TEST_CASE("alpha from p") {
  CHECK(alpha_from_p(2.0) == doctest::Approx(1.0));
  CHECK(alpha_from_p(6.0) == doctest::Approx(2.0));
  CHECK(alpha_from_p(12.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(alpha_from_p(1.5), std::domain_error);
  CHECK_THROWS_AS(LegendreSolution(1.0), std::domain_error);
}

TEST_CASE("f1 endpoint data") {
  for (double p : {2.5, 6.0, 7.5}) {
    const LegendreSolution sol(p);
    const Jet j = sol.jet(1.0);
    CHECK(j.value == 1.0);
    CHECK(j.d1 == doctest::Approx(p / 2.0).epsilon(1e-14));
    CHECK_THROWS_AS(sol.jet(-1.0), std::domain_error);
    CHECK_THROWS_AS(sol.jet(1.5), std::domain_error);
    CHECK_THROWS_AS(sol.second_jet(1.0), std::domain_error);
  }
}

TEST_CASE("series reports truncation") {
  const LegendreSolution sol(7.5);
  const SeriesEvalReport r = sol.series(0.3);
  CHECK(r.terms_used > 3);
  CHECK(r.est_trunc_error < 1e-13);
  CHECK(r.value == doctest::Approx(legendre_f1(sol, 0.3)).epsilon(1e-14));
}

TEST_CASE("f2 matches the second-kind function for integer degree") {
  // f2 = 2 Q_n - (log 2 - 2 H_n) P_n
  for (int n = 1; n <= 5; ++n) {
    const LegendreSolution sol = LegendreSolution::from_alpha(n);
    for (double s = -0.95; s < 0.999; s += 0.037) {
      const double ref = 2.0 * boost::math::legendre_q(n, s) - (std::log(2.0) - 2.0 * harmonic(n)) * std::legendre(n, s);
      INFO("n = " << n << ", s = " << s);
      CHECK(std::abs(legendre_f2(sol, s) - ref) < 1e-9 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("f2 has the logarithmic singularity at s = 1") {
  for (double p : {2.5, 6.0, 7.5, 30.0}) {
    const LegendreSolution sol(p);
    for (double d : {1e-4, 1e-6, 1e-8}) {
      const double s = 1.0 - d;
      const double h = legendre_f2(sol, s) - legendre_f1(sol, s) * std::log(1.0 / d);
      INFO("p = " << p << ", 1 - s = " << d);
      CHECK(std::abs(h) < 10.0 * p * d * std::log(1.0 / d));
    }
  }
}

TEST_CASE("Wronskian equals 2 / (1 - s^2)") {
  for (double p : {2.5, 6.0, 7.5, 12.0, 30.0}) {
    const LegendreSolution sol(p);
    for (double s = -0.95; s < 0.9999; s += 0.0499) {
      const double ref = 2.0 / (1.0 - s * s);
      INFO("p = " << p << ", s = " << s);
      CHECK(std::abs(sol.wronskian(s) - ref) < 1e-9 * ref);
    }
  }
}

TEST_CASE("J0 against the standard library") {
  for (double x = 0.0; x <= 10.0; x += 0.01) {
    CHECK(std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)) < 1e-13);
  }
  CHECK_THROWS_AS(bessel_j0(-1.0), std::domain_error);
  CHECK_THROWS_AS(bessel_j0(bessel_max_argument + 1.0), std::domain_error);
}

TEST_CASE("J0 solves Bessel's equation") {
  for (double x = 0.0; x <= 10.0; x += 0.05) {
    const BesselJet j = bessel_j0_jet(x);
    CHECK(std::abs(x * j.d2 + j.d1 + x * j.value) < 1e-10);
  }
}

TEST_CASE("first zero of J0") {
  const double j0 = find_j0();
  CHECK(std::abs(j0 - 2.404825557695773) < 1e-12);
  CHECK(std::abs(j0 - 2.4048) < 5e-5);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const QuadratureRule r = gauss_legendre_rule(10);
  for (int k = 0; k < 20; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * std::pow(r.nodes[i], k);
    const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
    CHECK(std::abs(sum - exact) < 1e-14);
  }
  const QuadratureResult q = integrate_composite_gl([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(std::abs(q.value - (std::numbers::e - 1.0)) < 1e-14);
  CHECK_THROWS_AS(integrate_composite_gl([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-15, 4),
                  NumericalFailure);
}

TEST_CASE("compensated summation") {
  CompensatedSum<double> s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-10));
}

TEST_CASE("15-digit formatting") {
  CHECK(format_g15(2.0 + std::sqrt(3.0)) == "3.73205080756888");
  CHECK(format_g15(6.0) == "6");
  CHECK(format_g15(1e-20) == "1e-20");
  CHECK(round_sig15(0.1 + 0.2) == 0.3);
}
