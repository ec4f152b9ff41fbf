#ifndef SHARPMTG_SHARP_CONSTANT_HPP
#define SHARPMTG_SHARP_CONSTANT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sharpmtg/legendre.hpp"
#include "sharpmtg/report.hpp"

namespace sharpmtg {

inline constexpr double kDefaultZeroTol = 1e-13;

/// Largest zero of f1 on (-1, 1). The bracket comes from a leftward scan from
/// s = 1 with step 0.5/p (halved on failure); the returned value is the
/// midpoint of a sign-changing bracket narrower than zero_tol.
double find_zp(const LegendreSolution& sol, double zero_tol = kDefaultZeroTol);
double find_zp(double p, double zero_tol = kDefaultZeroTol);

/// c_p = (1 + z_p) / (1 - z_p).
double sharp_cp(double p);

struct SharpConstants {
  double p = 2.0;
  double alpha = 1.0;
  double z_p = 0.0;
  double c_p = 1.0;
  double a_p = 0.0;  // NaN at p = 2 (touching degenerates)
  double i_p = 0.0;  // NaN at p = 2
  double zero_tol = kDefaultZeroTol;
};

/// beta(x) and a(x) of the touching construction, f1 playing the role of L_n.
double beta_fn(const LegendreSolution& sol, double x);
double a_fn(const LegendreSolution& sol, double x);

/// a_p = a(z_p). Requires p > 2.
double compute_ap(const LegendreSolution& sol, double z_p);

/// Inflection point of h_c: the i with c^p = ((1 + i)/(1 - i))^(p - 2).
double inflection_point(double p, double c);

SharpConstants compute_sharp_constants(const LegendreSolution& sol, double zero_tol = kDefaultZeroTol);
SharpConstants compute_sharp_constants(double p, double zero_tol = kDefaultZeroTol);

struct AsymptoticsRow {
  double p;
  double z_p;
  double c_p;
  double p_one_minus_z;  // p (1 - z_p), tends to j0^2 / 2
  double cp_over_p;      // c_p / p, tends to 4 / j0^2
  double fg1_constant;   // sqrt(2 (p^2 - p)), the bound for A*Z itself
  double baj_constant;   // sqrt((p^2 - p) / 2), the bound for the halved A*Z
};

struct AsymptoticsReport {
  std::vector<AsymptoticsRow> rows;
  double j0 = 0.0;
  double j0_sq_half = 0.0;
  double four_over_j0_sq = 0.0;
};

/// Requires p_list sorted ascending with every p >= 2.
AsymptoticsReport asymptotics_report(std::span<const double> p_list, double zero_tol = kDefaultZeroTol);

struct LemmaOptions {
  int grid = 200;
  int convexity_grid = 500;
  int minimality_pairs = 50;
  int minimality_grid = 4000;
  std::uint64_t seed = 20240611;
};

/// Numerical certificates of the facts the proof relies on: the zero and
/// positivity structure of f1, the bound (1+z_p)/2 >= p/(p+2), the tangent
/// inequality at s = 1, convexity of f1 on [z_p, 1), monotonicity of beta and
/// a(x), the touching equations, the sign of f2(z_p), the Wronskian, and the
/// rightmost-zero minimality of f1 among solutions c1 f1 + c2 f2.
ConstantsReport verify_lemmas(const LegendreSolution& sol, const SharpConstants& k, const LemmaOptions& opt = {});

}  // namespace sharpmtg

#endif
