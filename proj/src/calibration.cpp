#include "flga/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace flga {

double tau_approx(double c, double gamma) {
  const double cg = c * gamma;
  if (cg == 0.0) {
    throw std::invalid_argument("tau_approx: C*gamma must be nonzero");
  }
  return 1.0 / (1.0 - std::exp(-cg));
}

double tau_full(double gamma, double pi0) {
  const double eg = std::exp(gamma);
  const double denom = pi0 * (eg - 1.0 / (2.0 * std::sqrt(6.0))) + eg;
  if (!(denom > 0.0)) {
    throw std::invalid_argument("tau_full: non-positive denominator");
  }
  return 1.0 / denom - 1.0;
}

double gamma_d2q9(std::span<const double> lambda) {
  if (lambda.size() != 9) {
    throw std::invalid_argument("gamma_d2q9: expected 9 class rates");
  }
  // The classes are numbered 1..9 in the published combination; slot i of the
  // input holds class i+1, matching the enumeration order of the pair table.
  const double l1 = lambda[0];
  const double l3 = lambda[2];
  const double l4 = lambda[3];
  const double l6 = lambda[5];
  const double l7 = lambda[6];
  const double l8 = lambda[7];
  return (8.0 * l1 + l3 + 2.0 * (l4 + l6 + 2.0 * l7 + 4.0 * l8)) / 9.0;
}

double gamma_d1q3(double lambda, double factor) {
  return factor * lambda;
}

double viscosity_from_tau(double tau, ViscosityConvention mode) {
  if (tau < 0.5) {
    throw std::invalid_argument("viscosity_from_tau: tau below 1/2");
  }
  const double half_off = tau - 0.5;
  return mode == ViscosityConvention::standard ? half_off / 3.0
                                               : 3.0 * half_off;
}

double tau_from_viscosity(double nu, ViscosityConvention mode) {
  if (nu < 0.0) {
    throw std::invalid_argument("tau_from_viscosity: negative viscosity");
  }
  return mode == ViscosityConvention::standard ? 3.0 * nu + 0.5
                                               : nu / 3.0 + 0.5;
}

DecayFit fit_tau_from_decay(std::span<const double> amplitude,
                            double wavenumber) {
  if (amplitude.size() < 10) {
    throw std::invalid_argument("fit_tau_from_decay: need at least 10 samples");
  }
  const auto n = static_cast<double>(amplitude.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < amplitude.size(); ++i) {
    if (!(amplitude[i] > 0.0)) {
      throw std::invalid_argument(
          "fit_tau_from_decay: amplitudes must stay positive");
    }
    const double x = static_cast<double>(i);
    const double y = std::log(amplitude[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  DecayFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.nu = -fit.slope / (2.0 * wavenumber * wavenumber);
  fit.tau = tau_from_viscosity(std::max(fit.nu, 0.0));
  return fit;
}

namespace {

void validate_samples(std::span<const CalibrationSample> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("calibration fit: need at least 2 samples");
  }
  double prev_c = 0.0;
  for (const auto& s : samples) {
    if (!(s.c > prev_c)) {
      throw std::invalid_argument(
          "calibration fit: C values must be positive and strictly increasing");
    }
    if (!(s.tau_measured > 0.5)) {
      throw std::invalid_argument("calibration fit: tau must exceed 1/2");
    }
    prev_c = s.c;
  }
}

// Sum of squared residuals of the model against the measured taus.
template <class Model>
double sse(std::span<const CalibrationSample> samples, Model&& model) {
  double acc = 0.0;
  for (const auto& s : samples) {
    double r;
    try {
      r = model(s.c) - s.tau_measured;
    } catch (const std::invalid_argument&) {
      return std::numeric_limits<double>::infinity();
    }
    acc += r * r;
  }
  return acc;
}

// Coarse log-spaced scan followed by golden-section refinement. The objective
// is smooth and effectively unimodal over the physical parameter range, so
// this is plenty; a general optimizer would be overkill for one parameter.
template <class Model>
double minimize_1d(std::span<const CalibrationSample> samples, Model&& model,
                   double lo, double hi) {
  constexpr int kScan = 200;
  double best = lo, best_sse = std::numeric_limits<double>::infinity();
  const double ratio = std::pow(hi / lo, 1.0 / (kScan - 1));
  double x = lo;
  for (int i = 0; i < kScan; ++i, x *= ratio) {
    const double v = sse(samples, [&](double c) { return model(c, x); });
    if (v < best_sse) {
      best_sse = v;
      best = x;
    }
  }
  double a = best / ratio, b = best * ratio;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  for (int it = 0; it < 120; ++it) {
    const double f1 = sse(samples, [&](double c) { return model(c, c1); });
    const double f2 = sse(samples, [&](double c) { return model(c, c2); });
    if (f1 < f2) {
      b = c2;
    } else {
      a = c1;
    }
    c1 = b - gr * (b - a);
    c2 = a + gr * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

double fit_gamma(std::span<const CalibrationSample> samples) {
  validate_samples(samples);
  return minimize_1d(
      samples, [](double c, double g) { return tau_approx(c, g); }, 1e-3,
      1e3);
}

double fit_pi0(std::span<const CalibrationSample> samples, double gamma_scale) {
  validate_samples(samples);
  if (!(gamma_scale > 0.0)) {
    throw std::invalid_argument("fit_pi0: gamma scale must be positive");
  }
  // pi0 lives in a modest range around zero; scan linearly on both signs.
  constexpr int kScan = 400;
  double best = 0.0, best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    const double p = -1.0 + 2.0 * static_cast<double>(i) / (kScan - 1);
    const double v = sse(samples, [&](double c) {
      return tau_full(c * gamma_scale, p);
    });
    if (v < best_sse) {
      best_sse = v;
      best = p;
    }
  }
  double a = best - 2.0 / kScan, b = best + 2.0 / kScan;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  for (int it = 0; it < 120; ++it) {
    const double f1 =
        sse(samples, [&](double c) { return tau_full(c * gamma_scale, c1); });
    const double f2 =
        sse(samples, [&](double c) { return tau_full(c * gamma_scale, c2); });
    if (f1 < f2) {
      b = c2;
    } else {
      a = c1;
    }
    c1 = b - gr * (b - a);
    c2 = a + gr * (b - a);
  }
  return 0.5 * (a + b);
}

void write_curve_csv(std::ostream& os, const CalibrationCurve& curve) {
  validate_samples(curve.samples);
  os << "C,tau_measured,tau_approx,tau_full\n";
  const auto prec = os.precision(17);
  for (const auto& s : curve.samples) {
    os << s.c << ',' << s.tau_measured << ',' << tau_approx(s.c, curve.gamma)
       << ',' << tau_full(s.c * curve.gamma, curve.pi0) << '\n';
  }
  os.precision(prec);
}

}  // namespace flga
