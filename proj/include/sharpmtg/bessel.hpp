#ifndef SHARPMTG_BESSEL_HPP
#define SHARPMTG_BESSEL_HPP

namespace sharpmtg {

struct BesselJet {
  double value;
  double d1;
  double d2;
};

inline constexpr double bessel_max_argument = 40.0;

/// J0 from its power series, x in [0, 40].
double bessel_j0(double x);

/// J0 with first and second derivatives from the term-wise differentiated series.
BesselJet bessel_j0_jet(double x);

/// First positive zero of J0, bracketed on a coarse scan and bisected to 1e-12.
double find_j0();

}  // namespace sharpmtg

#endif
