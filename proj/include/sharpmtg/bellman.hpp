#ifndef SHARPMTG_BELLMAN_HPP
#define SHARPMTG_BELLMAN_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sharpmtg/legendre.hpp"
#include "sharpmtg/obstacle.hpp"
#include "sharpmtg/report.hpp"
#include "sharpmtg/sharp_constant.hpp"

namespace sharpmtg {

inline constexpr double kDefaultNumTol = 1e-8;

/// Dg = (1 - s^2) g'' - 2 s g' + p g
double D_op(double p, double s, const Jet& g);
/// Kg = p(p-1) g - 2(p-1) s g' - (1 - s^2) g''
double K_op(double p, double s, const Jet& g);
/// Dg / (1 - s^2) + Kg
double Dtilde_op(double p, double s, const Jet& g);

/// Second-order data of phi(x, y) = (x+y)^p g((y-x)/(x+y)) on x + y = 1.
/// With cleared = true every entry is multiplied by (1 - s^2), which keeps
/// the signs and removes the 1/(1 -+ s) blow-up of phi_x/x and phi_y/y.
struct QuadFormCoeffs {
  double phi_x_over_x = 0.0;
  double phi_xx = 0.0;
  double phi_xy = 0.0;
  double phi_yy = 0.0;
  double phi_y_over_y = 0.0;
  bool cleared = false;

  double A() const { return phi_x_over_x + phi_xx; }
  double B() const { return phi_xy; }
  double C() const { return phi_yy + phi_y_over_y; }
  /// B^2 - A C
  double discriminant() const { return B() * B() - A() * C(); }
  /// A + 2 B u b + C b^2 for |h| = 1, |k| = b, h.k = u b.
  double form(double u, double b) const { return A() + 2.0 * B() * u * b + C() * b * b; }
};

QuadFormCoeffs quad_form_coeffs(double p, double s, const Jet& g, bool cleared = false);

/// g_p: a f1 on [glue, 1], h_c on [-1, glue]. The standard candidate uses
/// c = c_p, glue = z_p, a = a_p. An overridden c keeps glue = z_p and picks a
/// by matching slopes there; for c < c_p it cannot be continuous.
class BellmanCandidate {
 public:
  explicit BellmanCandidate(double p, double zero_tol = kDefaultZeroTol);
  static BellmanCandidate with_override_c(double p, double c, double zero_tol = kDefaultZeroTol);

  double p() const { return consts_.p; }
  const SharpConstants& constants() const { return consts_; }
  const LegendreSolution& legendre() const { return sol_; }
  const Obstacle& obstacle() const { return obstacle_; }
  double c() const { return obstacle_.c; }
  double amplitude() const { return amplitude_; }
  double glue() const { return consts_.z_p; }
  bool overridden() const { return overridden_; }

  /// Active branch: Legendre for s >= glue, obstacle below.
  Jet jet(double s) const;
  double value(double s) const { return jet(s).value; }
  Jet jet_left(double s) const { return obstacle_.jet(s); }
  Jet jet_right(double s) const;

 private:
  static BellmanCandidate build(double p, std::optional<double> c_override, double zero_tol);
  BellmanCandidate(LegendreSolution sol, SharpConstants k, double c, double amplitude, bool overridden);

  LegendreSolution sol_;
  SharpConstants consts_;
  Obstacle obstacle_;
  double amplitude_;
  bool overridden_;
};

/// phi(x, y) = (x + y)^p g_p((y - x)/(x + y)), (x, y) != (0, 0).
double reconstruct_phi(const BellmanCandidate& g, double x, double y);

struct VerifyOptions {
  int grid = 2000;
  double num_tol = kDefaultNumTol;
  /// Half-width of the excluded neighbourhood of +-1.
  double endpoint_gap = 1e-6;
  /// Within this distance of +-1 the cleared forms are used.
  double clear_zone = 1e-3;
  int u_samples = 33;
  int b_samples = 32;
};

/// s-grid on [-1 + gap, 1 - gap] without the glue point, plus glue -+ 1e-9.
std::vector<double> verification_grid(const BellmanCandidate& g, const VerifyOptions& opt);

/// "minus" (Dg <= 0), "plus" (D~g <= 0), "K_nonpositive_right" (Kg <= 0 on the Legendre branch).
std::vector<CheckResult> verify_supersolution(const BellmanCandidate& g, const VerifyOptions& opt = {});

/// "quad_form" (sampled), "quad_form_k0" (A <= 0), "quad_form_exact" (maximum over the
/// direction set in closed form), "middle", "triangle_identity" and "middle_obstacle".
std::vector<CheckResult> verify_quadratic_form(const BellmanCandidate& g, const VerifyOptions& opt = {});

/// "tangent_slope", "tangent_separation", "ellp_tangent", "tangent_at_inflection".
std::vector<CheckResult> verify_tangent_separation(const BellmanCandidate& g, const VerifyOptions& opt = {});

/// "c1_matching", "majorization", "majorization_phi", "jump_at_glue", "homogeneity".
std::vector<CheckResult> verify_candidate_shape(const BellmanCandidate& g, const VerifyOptions& opt = {});

/// "finite_majorant": some a f1 + b f2 (b >= 0) majorizes h_c on [z_p, 1) and is
/// finite at 1. True for c = c_p (a = a_p, b = 0); fails for every c < c_p.
CheckResult verify_minimal_family(const BellmanCandidate& g, const VerifyOptions& opt = {});

/// All of the above.
std::vector<CheckResult> verify_all(const BellmanCandidate& g, const VerifyOptions& opt = {});

/// Rows s, g, g', g'', Dg, D~g on the verification grid, with header.
void write_candidate_csv(const BellmanCandidate& g, const VerifyOptions& opt, std::ostream& out);

}  // namespace sharpmtg

#endif
