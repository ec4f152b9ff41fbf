#ifndef SHARPMTG_LEGENDRE_HPP
#define SHARPMTG_LEGENDRE_HPP

// Solutions of the Legendre equation (1 - s^2) y'' - 2 s y' + p y = 0 for real
// degree alpha >= 1, p = alpha (alpha + 1):
//   f1 - the solution bounded at s = 1, normalized by f1(1) = 1;
//   f2 - the companion with f2(s) = f1(s) log(1/(1-s)) + H(s), H(1) = 0.

#include <string>
#include <vector>

namespace sharpmtg {

/// Value with first and second derivative.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

struct SeriesEvalReport {
  double value = 0.0;
  int terms_used = 0;
  double est_trunc_error = 0.0;
};

struct LegendreOptions {
  /// Series truncation: three consecutive terms below trunc_tol * max(1, |partial sum|).
  double trunc_tol = 1e-14;
  int max_terms = 10000;
  /// Closest approach to the singular endpoint s = -1.
  double radius_guard = 1e-6;
  /// Below this point f1 is continued by Taylor stepping instead of the series.
  double series_min_s = -0.5;
};

/// alpha with alpha (alpha + 1) = p. Rejects p < 2.
double alpha_from_p(double p);

class LegendreSolution {
 public:
  explicit LegendreSolution(double p, LegendreOptions opts = {});
  static LegendreSolution from_alpha(double alpha, LegendreOptions opts = {});

  double p() const { return p_; }
  double alpha() const { return alpha_; }
  const LegendreOptions& options() const { return opts_; }

  /// Coefficients a_n of f1(s) = sum_n a_n (s - 1)^n; a_0 = 1, a_1 = p/2.
  const std::vector<long double>& coefficients() const { return coeffs_; }
  /// JSON array of {"n", "a_n"} objects for debugging.
  std::string coefficients_json() const;

  /// Left end of the interval on which the series is evaluated directly.
  double series_lower_limit() const { return series_lower_; }

  /// Raw series for f1 with its truncation report; s in [series_lower_limit(), 1].
  SeriesEvalReport series(double s) const;

  /// f1 on (-1, 1].
  double value(double s) const { return jet(s).value; }
  /// f1, f1', f1''. The series route differentiates term by term; f1(1), f1'(1)
  /// and f1''(1) come from the closed endpoint formulas.
  Jet jet(double s) const;

  /// f2 with derivatives on (-1, 1).
  Jet second_jet(double s) const;
  double second_value(double s) const { return second_jet(s).value; }

  /// f1 f2' - f1' f2 from the numerical jets; analytically 2 / (1 - s^2).
  double wronskian(double s) const;

 private:
  struct SeriesSums {
    long double tail = 0.0L;  // f1 - 1
    long double d1 = 0.0L;
    long double d2 = 0.0L;
    int terms = 0;
    double est_error = 0.0;
  };

  // tail_relative: truncate relative to |f1 - 1| instead of max(1, |f1|).
  // u = s - 1 is passed directly so callers near s = 1 keep full precision.
  SeriesSums sum_series(long double u, bool derivatives, bool tail_relative = false) const;
  Jet continue_from(double s0, Jet start, double s_target) const;
  double log_remainder(double s) const;
  void check_domain(double s, bool allow_one) const;

  double p_;
  double alpha_;
  LegendreOptions opts_;
  std::vector<long double> coeffs_;
  bool terminating_ = false;
  double series_lower_;
  double f2_base_;
  Jet f2_at_base_;
};

double legendre_f1(const LegendreSolution& sol, double s);
double legendre_f2(const LegendreSolution& sol, double s);

/// f1'' from the equation itself, (2 s f1' - p f1) / (1 - s^2), for |s| < 1.
double second_derivative_from_ode(double p, double s, double value, double d1);

/// Independent check of f1: integrates the Legendre equation with adaptive
/// Dormand-Prince steps from s0 = 1 - 1e-3 (series initial data) to s_target.
/// `step` is the initial step size.
double legendre_f1_ode_oracle(double alpha, double s_target, double step);

}  // namespace sharpmtg

#endif
