#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flga/calibration.hpp"
#include "flga/config.hpp"

namespace flga {

// Shared norm routine used by every comparison path: l2 is the relative
// Euclidean distance (absolute when the reference norm vanishes), max the
// largest absolute pointwise difference.
struct ErrorNorms {
  double l2 = 0.0;
  double max = 0.0;
};

ErrorNorms error_norms(std::span<const double> value, std::span<const double> reference);

// Centered sliding mean; the window is clamped at the ends so the output has
// the input length. window <= 1 copies the input.
std::vector<double> moving_average(std::span<const double> values, int window);

// One entry of an equilibrium sweep: the requested initial bias, the
// time-averaged moments and distributions, and the worst per-channel
// relative deviation from the analytic equilibrium at those moments.
struct SweepPoint {
  double setting = 0.0;
  double rho = 0.0, ux = 0.0, uy = 0.0;
  std::vector<double> f;
  double max_rel_error = 0.0;
};

/**
 * @brief Outcome of one configured run.
 *
 * The profile norms are filled when the case has a comparison target
 * (reference solver or analytic solution); equilibrium sweeps report
 * per-point deviations in `sweep` instead. Drifts are relative to the
 * initial mass. Phase timings cover the primary solver only; total_seconds
 * spans the whole case including any reference run.
 */
struct CaseReport {
  CaseId case_id{};
  int steps_run = 0;
  ErrorNorms density_error, velocity_error;
  double mass_drift = 0.0;
  double momentum_drift = 0.0;
  double collide_seconds = 0.0, stream_seconds = 0.0, total_seconds = 0.0;
  long long clamp_events = 0;
  bool unstable = false;
  double fitted_tau = 0.0;  // vortex decay fit; zero for other cases
  double fitted_nu = 0.0;
  std::vector<SweepPoint> sweep;
};

/**
 * @brief Execute one configured case and report on it.
 *
 * Deterministic given the config (the random seed only enters sampled
 * quantum measurements). When output_dir is set, writes grid snapshots at
 * the effective cadence, a final binary field dump, a key = value report
 * and a case-specific CSV (sweep table, profile comparison, decay series or
 * cavity centerlines). With compare = qflga use qflga_compare instead.
 */
CaseReport run_case(const RunConfig& config);

void write_report(std::ostream& os, const CaseReport& report);
void write_sweep_csv(std::ostream& os, const CaseReport& report);

// One relaxation-time sample of a rate-multiplier sweep. `stable` means the
// run stayed clean (no clamps, no overflow) and the fit produced a positive
// viscosity; unstable samples keep their C but carry no usable tau.
struct TauSweepPoint {
  double c = 0.0;
  double tau = 0.0;
  bool stable = false;
};

struct TauSweepResult {
  std::vector<TauSweepPoint> points;
  CalibrationCurve curve;  // fitted over the stable samples
  bool curve_valid = false;
};

/**
 * @brief Measure the relaxation time over config.sweep_c.
 *
 * Requires exactly one enabled interaction order; each sample rebuilds the
 * collision table with that order's multiplier replaced. Vortex configs fit
 * tau from the decay envelope; shockwave configs match the smoothed density
 * profile against a scan of reference-solver relaxation times. Unstable
 * samples are flagged and skipped by the curve fit, the sweep continues.
 */
TauSweepResult sweep_tau(const RunConfig& config);

void write_tau_points_csv(std::ostream& os, std::span<const TauSweepPoint> points);

// Wall time of the collision kernel alone, best of `reps` repetitions.
struct BenchRow {
  std::string solver;
  int lx = 0, ly = 0;
  int sites = 0;
  int steps = 0;
  int reps = 0;
  double seconds_per_step = 0.0;
};

/**
 * @brief Time one collision step across grid sizes and solvers.
 *
 * Solvers: "lbm" (single-relaxation-time reference), "flga2" (pair table),
 * "flga3" (triple-only table). Plane configs use near-square grids of
 * roughly the requested site counts; step counts shrink with the grid so
 * each measurement does comparable work. Kernels run serially so the
 * numbers reflect per-site cost.
 */
std::vector<BenchRow> bench_timing(const RunConfig& config);

struct LogLogFit {
  double slope = 0.0;
  double r2 = 0.0;
};

// Least-squares slope of log(seconds per step) against log(site count)
// over one solver's rows.
LogLogFit bench_fit(std::span<const BenchRow> rows, const std::string& solver);

void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows);

/**
 * @brief Step-by-step comparison of the emulated quantum update with the
 * classical kernel on a chain.
 *
 * Both paths start from the same state (density step for shockwave configs,
 * constant state otherwise), apply one collision + streaming update per
 * step, and for shockwave configs turn wrapped-around mass back at the
 * domain ends on the opposite channel, which realizes reflecting walls on
 * top of the periodic shift. shots = 0 compares exact measurement marginals;
 * otherwise each step samples that many shots (seeded, reproducible).
 * Requires a d1q3 config with a single pair order, a scalar rate and a
 * power-of-two length.
 */
struct QflgaCompareReport {
  int steps_run = 0;
  double first_step_difference = 0.0;  // max-abs f gap after one step
  double max_abs_difference = 0.0;     // worst gap over the whole run
  double mass_drift = 0.0;             // quantum path, relative
  double total_seconds = 0.0;
  std::vector<double> per_step_difference;
};

QflgaCompareReport qflga_compare(const RunConfig& config);

}  // namespace flga
