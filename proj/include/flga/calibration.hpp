#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace flga {

// Relaxation time from the exponential collision-count relation,
//   tau = 1 / (1 - exp(-C*gamma)).
// Strictly decreasing in C, approaching 1 from above. Throws for C*gamma = 0.
double tau_approx(double c, double gamma);

// The published closed form including the initial non-conserved moment
// deviation pi0 (1D form):
//   tau = 1 / (pi0*(e^gamma - 1/(2*sqrt(6))) + e^gamma) - 1.
// Evaluated literally; throws when the denominator is not positive.
double tau_full(double gamma, double pi0);

// Aggregate effective rate for the nine two-body classes of the plane model,
//   gamma = (1/9) * (8 l1 + l3 + 2 (l4 + l6 + 2 l7 + 4 l8)),
// the published linear combination (indices are 1-based class slots).
// Note this is the unordered-pair sum counted once per ordering; the dynamic
// relaxation rate of the shear mode is half of it (see tests/test_relaxation).
double gamma_d2q9(std::span<const double> lambda);

// Chain-model aggregate rate. The published relation uses half the pair rate;
// the factor is a parameter rather than a constant so sweeps can probe it.
double gamma_d1q3(double lambda, double factor = 0.5);

enum class ViscosityConvention {
  standard,       // nu = cs2 * (tau - 1/2), cs2 = 1/3
  paper_literal,  // nu = (tau - 1/2) / cs2, the relation as printed
};

// Throws for tau < 0.5; tau = 0.5 is the zero-viscosity boundary.
double viscosity_from_tau(double tau,
                          ViscosityConvention mode = ViscosityConvention::standard);
double tau_from_viscosity(double nu,
                          ViscosityConvention mode = ViscosityConvention::standard);

struct DecayFit {
  double nu = 0.0;
  double tau = 0.0;
  double slope = 0.0;      // d ln(amplitude) / d step
  double intercept = 0.0;  // ln(amplitude) at step 0
};

// Least-squares fit of ln(amplitude) against the step index; the decay slope
// is read as -2*nu*k^2 with k the initialization wavenumber (k = 1 reproduces
// the published unit convention). Throws for fewer than 10 samples or any
// non-positive amplitude.
DecayFit fit_tau_from_decay(std::span<const double> amplitude,
                            double wavenumber = 1.0);

struct CalibrationSample {
  double c = 0.0;
  double tau_measured = 0.0;
};

enum class CurveModel { approx, full };

// A measured tau(C) relation plus the parameters fitted to it. Samples must
// have strictly increasing positive C and tau > 0.5.
struct CalibrationCurve {
  std::vector<CalibrationSample> samples;
  double gamma = 0.0;
  double pi0 = 0.0;
  CurveModel model = CurveModel::approx;
};

// One-parameter least-squares fits against the measured samples. fit_gamma
// matches tau_approx(C, gamma); fit_pi0 matches tau_full(C * gamma_scale, pi0)
// with the rate fixed. Both throw on invalid samples.
double fit_gamma(std::span<const CalibrationSample> samples);
double fit_pi0(std::span<const CalibrationSample> samples, double gamma_scale);

// Columns: C, tau_measured, tau_approx, tau_full. The model columns evaluate
// the curve's fitted parameters at each sample's C.
void write_curve_csv(std::ostream& os, const CalibrationCurve& curve);

}  // namespace flga
