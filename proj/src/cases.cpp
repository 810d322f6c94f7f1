#include "flga/cases.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "flga/collision_table.hpp"
#include "flga/core.hpp"
#include "flga/equilibrium.hpp"
#include "flga/lbm.hpp"
#include "flga/qflga.hpp"

namespace flga {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> class_rates(const LatticeDescriptor& desc, int bodies,
                                std::span<const double> lambda) {
  const auto enumeration = enumerate_equivalence_classes(desc, bodies);
  if (lambda.size() == enumeration.classes.size())
    return {lambda.begin(), lambda.end()};
  return std::vector<double>(enumeration.classes.size(), lambda.front());
}

std::vector<CollisionTable> build_tables(const RunConfig& cfg) {
  const auto& desc = descriptor(cfg.model);
  std::vector<CollisionTable> tables;
  for (const auto& order : cfg.orders) {
    const auto enumeration = enumerate_equivalence_classes(desc, order.bodies);
    const auto rates = class_rates(desc, order.bodies, cfg.lambda);
    tables.push_back(build_collision_table(desc, enumeration, rates, order.c));
  }
  return tables;
}

CollideOptions collide_options(const RunConfig& cfg) {
  CollideOptions options;
  options.exec = cfg.exec;
  options.strict = cfg.strict;
  options.incompressible = cfg.incompressible;
  options.rho0 = cfg.rho0;
  return options;
}

void ensure_stream(std::ofstream& os, const fs::path& path) {
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

// Owns the evolving field plus the bookkeeping every trajectory case shares:
// phase timers, clamp accounting, conservation baselines and snapshots.
struct Trajectory {
  const RunConfig& cfg;
  CaseReport& report;
  std::vector<CollisionTable> tables;
  CollideOptions options;
  FieldState field, scratch;
  fs::path out;
  int cadence = 0;
  bool solid = false;
  double mass0 = 0.0;
  std::array<double, 2> momentum0{};

  Trajectory(const RunConfig& config, CaseReport& rep, FieldState initial,
             bool want_snapshots)
      : cfg(config),
        report(rep),
        tables(build_tables(config)),
        options(collide_options(config)),
        field(std::move(initial)),
        scratch(field) {
    if (want_snapshots && !cfg.output_dir.empty()) {
      out = cfg.output_dir;
      cadence = effective_cadence(cfg);
    }
    solid = field.has_solid();
    mass0 = total_mass(field);
    momentum0 = total_momentum(field);
    snapshot(0);
  }

  void snapshot(int step) {
    if (out.empty() || cadence <= 0) return;
    if (step != 0 && step != cfg.steps && step % cadence != 0) return;
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06d.csv", step);
    std::ofstream os(out / name);
    ensure_stream(os, out / name);
    write_snapshot_csv(os, field);
  }

  void advance(int step) {
    auto t0 = Clock::now();
    const auto stats = collide(field, std::span<const CollisionTable>(tables), options);
    report.collide_seconds += seconds_since(t0);

    t0 = Clock::now();
    stream(field, scratch, cfg.exec);
    if (solid) apply_boundaries(field);
    report.stream_seconds += seconds_since(t0);

    report.clamp_events += stats.clamp_events;
    if (!stats.clean()) report.unstable = true;
    snapshot(step);
  }

  // Fold this run's conservation drift into the report (several runs share
  // one report during sweeps, so the worst drift wins).
  void finish() {
    const double mass = total_mass(field);
    const auto momentum = total_momentum(field);
    if (!std::isfinite(mass)) report.unstable = true;
    report.mass_drift = std::max(report.mass_drift, std::abs(mass - mass0) / mass0);
    const double dp = std::max(std::abs(momentum[0] - momentum0[0]),
                               std::abs(momentum[1] - momentum0[1]));
    report.momentum_drift = std::max(report.momentum_drift, dp / mass0);
    if (!out.empty()) {
      std::ofstream os(out / "final.bin", std::ios::binary);
      ensure_stream(os, out / "final.bin");
      write_field_binary(os, field);
    }
  }
};

std::vector<double> sweep_values(const RunConfig& cfg) {
  std::vector<double> values;
  for (int k = 0;; ++k) {
    double v = cfg.sweep_min + k * cfg.sweep_step;
    if (v > cfg.sweep_max + cfg.sweep_step * 1e-6) break;
    v = std::clamp(v, cfg.sweep_min, cfg.sweep_max);
    if (std::abs(v) < cfg.sweep_step * 1e-9) v = 0.0;
    values.push_back(v);
  }
  return values;
}

SiteMoments moments_of(const LatticeDescriptor& desc, std::span<const double> f) {
  double rho = 0.0, px = 0.0, py = 0.0;
  for (int ch = 0; ch < desc.q; ++ch) {
    rho += f[ch];
    px += desc.vx[ch] * f[ch];
    py += desc.vy[ch] * f[ch];
  }
  if (rho <= 0.0) return {rho, 0.0, 0.0};
  return {rho, px / rho, py / rho};
}

std::vector<double> analytic_equilibrium(Model model, const SiteMoments& m) {
  if (model == Model::d1q3) {
    const auto eq = equilibrium_d1q3(m.rho, m.ux);
    return {eq.begin(), eq.end()};
  }
  const auto eq = equilibrium_d2q9(m.rho, m.ux, m.uy);
  return {eq.begin(), eq.end()};
}

void write_sweep_outputs(const RunConfig& cfg, const CaseReport& report) {
  if (cfg.output_dir.empty()) return;
  const fs::path path = fs::path(cfg.output_dir) / "sweep.csv";
  std::ofstream os(path);
  ensure_stream(os, path);
  write_sweep_csv(os, report);
}

// Time- and space-averaged distributions per initial bias, compared with the
// analytic equilibrium at the averaged moments.
void run_equilibrium(const RunConfig& cfg, CaseReport& report) {
  const auto& desc = descriptor(cfg.model);
  const bool planar = desc.dim == 2;
  const int sites = cfg.lx * cfg.ly;

  for (const double setting : sweep_values(cfg)) {
    FieldState initial = make_field(cfg.model, cfg.lx, cfg.ly);
    if (planar) {
      // Seed from the quadratic equilibrium: same moments, different shape,
      // so the kernel has to relax onto its own fixed point.
      const auto seed = lbm_feq_d2q9(cfg.rho0, setting, cfg.uy0);
      for (int ch = 0; ch < desc.q; ++ch)
        std::fill_n(initial.channel(ch), sites, seed[ch]);
    } else {
      init_sine(initial, setting);
    }

    Trajectory traj(cfg, report, std::move(initial), false);
    std::vector<double> accum(desc.q, 0.0);
    long long averaged_steps = 0;
    for (int t = 1; t <= cfg.steps; ++t) {
      traj.advance(t);
      if (t <= cfg.warmup) continue;
      ++averaged_steps;
      for (int ch = 0; ch < desc.q; ++ch) {
        const double* f = traj.field.channel(ch);
        double sum = 0.0;
        for (int s = 0; s < sites; ++s) sum += f[s];
        accum[ch] += sum;
      }
    }
    traj.finish();
    report.steps_run += cfg.steps;

    SweepPoint point;
    point.setting = setting;
    point.f.resize(desc.q);
    for (int ch = 0; ch < desc.q; ++ch)
      point.f[ch] = accum[ch] / (static_cast<double>(averaged_steps) * sites);
    const auto m = moments_of(desc, point.f);
    point.rho = m.rho;
    point.ux = m.ux;
    point.uy = m.uy;
    const auto eq = analytic_equilibrium(cfg.model, m);
    double worst = 0.0;
    for (int ch = 0; ch < desc.q; ++ch)
      worst = std::max(worst, std::abs(point.f[ch] - eq[ch]) /
                                  std::max(eq[ch], 1e-300));
    point.max_rel_error = worst;
    report.sweep.push_back(std::move(point));
  }
  write_sweep_outputs(cfg, report);
}

struct Profiles {
  std::vector<double> rho, ux;
};

Profiles fluid_profiles(const FieldState& state) {
  Profiles p;
  for (int site = 0; site < state.sites(); ++site) {
    if (state.kind[site] != CellKind::fluid) continue;
    const auto m = site_moments(state, site);
    p.rho.push_back(m.rho);
    p.ux.push_back(m.ux);
  }
  return p;
}

void run_shockwave(const RunConfig& cfg, CaseReport& report) {
  FieldState initial = make_field(Model::d1q3, cfg.lx);
  init_shockwave(initial, cfg.rho1, cfg.rho2);
  Trajectory traj(cfg, report, std::move(initial), true);
  for (int t = 1; t <= cfg.steps; ++t) traj.advance(t);
  traj.finish();
  report.steps_run = cfg.steps;

  if (cfg.compare != CompareTarget::lbm) return;

  FieldState ref = make_field(Model::d1q3, cfg.lx);
  init_shockwave(ref, cfg.rho1, cfg.rho2);
  FieldState ref_scratch = ref;
  const BgkParams params{cfg.lbm_tau};
  for (int t = 1; t <= cfg.steps; ++t) lbm_step(ref, ref_scratch, params, cfg.exec);

  const auto mine = fluid_profiles(traj.field);
  const auto theirs = fluid_profiles(ref);
  const auto rho_s = moving_average(mine.rho, 10);
  const auto ux_s = moving_average(mine.ux, 10);
  const auto ref_rho_s = moving_average(theirs.rho, 10);
  const auto ref_ux_s = moving_average(theirs.ux, 10);
  report.density_error = error_norms(rho_s, ref_rho_s);
  report.velocity_error = error_norms(ux_s, ref_ux_s);

  if (!cfg.output_dir.empty()) {
    const fs::path path = fs::path(cfg.output_dir) / "profiles.csv";
    std::ofstream os(path);
    ensure_stream(os, path);
    os << std::setprecision(17)
       << "x,rho,ux,rho_ref,ux_ref,rho_smooth,ux_smooth,rho_ref_smooth,ux_ref_smooth\n";
    for (std::size_t i = 0; i < mine.rho.size(); ++i)
      os << i + 1 << ',' << mine.rho[i] << ',' << mine.ux[i] << ',' << theirs.rho[i]
         << ',' << theirs.ux[i] << ',' << rho_s[i] << ',' << ux_s[i] << ','
         << ref_rho_s[i] << ',' << ref_ux_s[i] << '\n';
  }
}

double peak_speed_x(const FieldState& state) {
  double peak = 0.0;
  for (int site = 0; site < state.sites(); ++site) {
    if (state.kind[site] != CellKind::fluid) continue;
    peak = std::max(peak, std::abs(site_moments(state, site).ux));
  }
  return peak;
}

void run_taylor_green(const RunConfig& cfg, CaseReport& report) {
  TaylorGreenSpec spec;
  spec.u_max = cfg.u_max;
  spec.rho0 = cfg.rho0;
  spec.kx = 2.0 * std::numbers::pi * cfg.periods_x / cfg.lx;
  spec.ky = 2.0 * std::numbers::pi * cfg.periods_y / cfg.ly;

  FieldState initial = make_field(Model::d2q9, cfg.lx, cfg.ly);
  init_taylor_green(initial, spec);
  Trajectory traj(cfg, report, std::move(initial), true);

  std::vector<double> amplitude;
  amplitude.reserve(cfg.steps + 1);
  amplitude.push_back(peak_speed_x(traj.field));
  for (int t = 1; t <= cfg.steps; ++t) {
    traj.advance(t);
    amplitude.push_back(peak_speed_x(traj.field));
  }
  traj.finish();
  report.steps_run = cfg.steps;

  // Fit the decay envelope past the kinetic transient and above the level
  // where the signal has decayed to numerical dust.
  const int skip = std::max(10, cfg.steps / 10);
  std::size_t end = amplitude.size();
  const double floor = amplitude.front() * 1e-8;
  for (std::size_t i = skip; i < amplitude.size(); ++i) {
    if (!(amplitude[i] > floor) || !std::isfinite(amplitude[i])) {
      end = i;
      break;
    }
  }
  DecayFit fit{};
  bool fitted = false;
  if (end > static_cast<std::size_t>(skip) + 10) {
    const double k_eff = std::sqrt((spec.kx * spec.kx + spec.ky * spec.ky) / 2.0);
    try {
      fit = fit_tau_from_decay(
          std::span<const double>(amplitude.data() + skip, end - skip), k_eff);
      fitted = fit.nu > 0.0;
      report.fitted_tau = fit.tau;
      report.fitted_nu = fit.nu;
    } catch (const std::invalid_argument&) {
      fitted = false;
    }
  }
  if (!fitted) report.unstable = true;

  if (cfg.compare == CompareTarget::analytic && fitted) {
    const auto analytic =
        taylor_green_analytic(cfg.lx, cfg.ly, spec, report.fitted_nu, cfg.steps);
    const auto macro = macroscopic(traj.field);
    report.density_error = error_norms(macro.rho, analytic.rho);
    std::vector<double> u_mine(macro.ux), u_ref(analytic.ux);
    u_mine.insert(u_mine.end(), macro.uy.begin(), macro.uy.end());
    u_ref.insert(u_ref.end(), analytic.uy.begin(), analytic.uy.end());
    report.velocity_error = error_norms(u_mine, u_ref);
  }

  if (!cfg.output_dir.empty()) {
    const fs::path path = fs::path(cfg.output_dir) / "decay.csv";
    std::ofstream os(path);
    ensure_stream(os, path);
    os << std::setprecision(17) << "step,amplitude,fit\n";
    for (std::size_t t = 0; t < amplitude.size(); ++t) {
      const double fit_value =
          fitted ? std::exp(fit.intercept + fit.slope * (static_cast<double>(t) - skip))
                 : 0.0;
      os << t << ',' << amplitude[t] << ',' << fit_value << '\n';
    }
  }
}

void run_lid_cavity(const RunConfig& cfg, CaseReport& report) {
  FieldState initial = make_field(Model::d2q9, cfg.lx, cfg.ly);
  init_uniform(initial, cfg.rho0);
  initial.wall_ux = cfg.wall_speed;
  for (int x = 0; x < cfg.lx; ++x) {
    initial.kind[initial.index(x, 0)] = CellKind::wall;
    initial.kind[initial.index(x, cfg.ly - 1)] = CellKind::moving_wall;
  }
  for (int y = 0; y < cfg.ly; ++y) {
    initial.kind[initial.index(0, y)] = CellKind::wall;
    initial.kind[initial.index(cfg.lx - 1, y)] = CellKind::wall;
  }
  for (int site = 0; site < initial.sites(); ++site) {
    if (initial.kind[site] == CellKind::fluid) continue;
    for (int ch = 0; ch < initial.channels(); ++ch) initial.at(ch, site) = 0.0;
  }

  Trajectory traj(cfg, report, std::move(initial), true);
  for (int t = 1; t <= cfg.steps; ++t) traj.advance(t);
  traj.finish();
  report.steps_run = cfg.steps;

  if (cfg.output_dir.empty()) return;
  const auto macro = macroscopic(traj.field);
  {
    const fs::path path = fs::path(cfg.output_dir) / "centerline_x.csv";
    std::ofstream os(path);
    ensure_stream(os, path);
    os << std::setprecision(17) << "y,ux,ux_over_lid\n";
    const int x = cfg.lx / 2;
    for (int y = 0; y < cfg.ly; ++y) {
      const double ux = macro.ux[traj.field.index(x, y)];
      os << y << ',' << ux << ',' << ux / cfg.wall_speed << '\n';
    }
  }
  {
    const fs::path path = fs::path(cfg.output_dir) / "centerline_y.csv";
    std::ofstream os(path);
    ensure_stream(os, path);
    os << std::setprecision(17) << "x,uy,uy_over_lid\n";
    const int y = cfg.ly / 2;
    for (int x = 0; x < cfg.lx; ++x) {
      const double uy = macro.uy[traj.field.index(x, y)];
      os << x << ',' << uy << ',' << uy / cfg.wall_speed << '\n';
    }
  }
}

void run_uniform(const RunConfig& cfg, CaseReport& report) {
  const bool planar = descriptor(cfg.model).dim == 2;
  FieldState initial = make_field(cfg.model, cfg.lx, planar ? cfg.ly : 1);
  init_uniform(initial, cfg.rho0, cfg.ux0, cfg.uy0);
  const auto before = macroscopic(initial);

  Trajectory traj(cfg, report, std::move(initial), true);
  for (int t = 1; t <= cfg.steps; ++t) traj.advance(t);
  traj.finish();
  report.steps_run = cfg.steps;

  if (cfg.compare == CompareTarget::analytic) {
    const auto after = macroscopic(traj.field);
    report.density_error = error_norms(after.rho, before.rho);
    std::vector<double> u_after(after.ux), u_before(before.ux);
    u_after.insert(u_after.end(), after.uy.begin(), after.uy.end());
    u_before.insert(u_before.end(), before.uy.begin(), before.uy.end());
    report.velocity_error = error_norms(u_after, u_before);
  }
}

}  // namespace

ErrorNorms error_norms(std::span<const double> value, std::span<const double> reference) {
  if (value.size() != reference.size())
    throw std::invalid_argument("error_norms: length mismatch");
  double diff2 = 0.0, ref2 = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const double d = value[i] - reference[i];
    diff2 += d * d;
    ref2 += reference[i] * reference[i];
    worst = std::max(worst, std::abs(d));
  }
  ErrorNorms norms;
  norms.max = worst;
  norms.l2 = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
  return norms;
}

std::vector<double> moving_average(std::span<const double> values, int window) {
  if (window <= 1) return {values.begin(), values.end()};
  const int n = static_cast<int>(values.size());
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - window / 2);
    const int hi = std::min(n - 1, i + (window - 1) / 2);
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) sum += values[j];
    out[i] = sum / (hi - lo + 1);
  }
  return out;
}

CaseReport run_case(const RunConfig& cfg) {
  if (cfg.compare == CompareTarget::qflga)
    throw std::invalid_argument(
        "run_case: quantum comparisons run through qflga_compare");
  const auto start = Clock::now();
  if (!cfg.output_dir.empty()) fs::create_directories(cfg.output_dir);

  CaseReport report;
  report.case_id = cfg.case_id;
  switch (cfg.case_id) {
    case CaseId::equilibrium_1d:
    case CaseId::equilibrium_2d:
      run_equilibrium(cfg, report);
      break;
    case CaseId::shockwave:
      run_shockwave(cfg, report);
      break;
    case CaseId::taylor_green:
      run_taylor_green(cfg, report);
      break;
    case CaseId::lid_cavity:
      run_lid_cavity(cfg, report);
      break;
    case CaseId::uniform:
      run_uniform(cfg, report);
      break;
  }
  report.total_seconds = seconds_since(start);

  if (!cfg.output_dir.empty()) {
    {
      const fs::path path = fs::path(cfg.output_dir) / "report.txt";
      std::ofstream os(path);
      ensure_stream(os, path);
      write_report(os, report);
    }
    {
      const fs::path path = fs::path(cfg.output_dir) / "config.cfg";
      std::ofstream os(path);
      ensure_stream(os, path);
      write_config(os, cfg);
    }
  }
  return report;
}

void write_report(std::ostream& os, const CaseReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "case = " << to_string(report.case_id) << "\n";
  out << "steps_run = " << report.steps_run << "\n";
  out << "density_l2 = " << report.density_error.l2 << "\n";
  out << "density_max = " << report.density_error.max << "\n";
  out << "velocity_l2 = " << report.velocity_error.l2 << "\n";
  out << "velocity_max = " << report.velocity_error.max << "\n";
  out << "mass_drift = " << report.mass_drift << "\n";
  out << "momentum_drift = " << report.momentum_drift << "\n";
  out << "collide_seconds = " << report.collide_seconds << "\n";
  out << "stream_seconds = " << report.stream_seconds << "\n";
  out << "total_seconds = " << report.total_seconds << "\n";
  out << "clamp_events = " << report.clamp_events << "\n";
  out << "unstable = " << (report.unstable ? "true" : "false") << "\n";
  out << "fitted_tau = " << report.fitted_tau << "\n";
  out << "fitted_nu = " << report.fitted_nu << "\n";
  out << "sweep_points = " << report.sweep.size() << "\n";
  os << out.str();
}

void write_sweep_csv(std::ostream& os, const CaseReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  const std::size_t q = report.sweep.empty() ? 0 : report.sweep.front().f.size();
  out << "setting,rho,ux,uy";
  for (std::size_t ch = 0; ch < q; ++ch) out << ",f" << ch;
  out << ",max_rel_error\n";
  for (const auto& point : report.sweep) {
    out << point.setting << ',' << point.rho << ',' << point.ux << ',' << point.uy;
    for (const double f : point.f) out << ',' << f;
    out << ',' << point.max_rel_error << '\n';
  }
  os << out.str();
}

namespace {

// Relaxation time of one shockwave sample, found by matching the smoothed
// density profile against the reference solver over a scan of tau.
TauSweepPoint shockwave_tau_sample(const RunConfig& cfg) {
  TauSweepPoint point;
  point.c = cfg.orders[0].c;

  CaseReport scratch_report;
  FieldState initial = make_field(Model::d1q3, cfg.lx);
  init_shockwave(initial, cfg.rho1, cfg.rho2);
  Trajectory traj(cfg, scratch_report, std::move(initial), false);
  for (int t = 1; t <= cfg.steps; ++t) traj.advance(t);
  traj.finish();
  if (scratch_report.unstable || !std::isfinite(total_mass(traj.field))) return point;

  const auto target = moving_average(fluid_profiles(traj.field).rho, 10);

  const auto objective = [&](double tau) {
    FieldState ref = make_field(Model::d1q3, cfg.lx);
    init_shockwave(ref, cfg.rho1, cfg.rho2);
    FieldState ref_scratch = ref;
    const BgkParams params{tau};
    for (int t = 1; t <= cfg.steps; ++t) lbm_step(ref, ref_scratch, params, cfg.exec);
    const auto profile = moving_average(fluid_profiles(ref).rho, 10);
    double sum = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      const double d = profile[i] - target[i];
      sum += d * d;
    }
    return sum;
  };

  // Coarse geometric scan, then a golden-section polish of the best bracket.
  const double tau_lo = 0.505, tau_hi = 8.0;
  const int coarse = 21;
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> grid(coarse);
  for (int i = 0; i < coarse; ++i) {
    grid[i] = tau_lo * std::pow(tau_hi / tau_lo, static_cast<double>(i) / (coarse - 1));
    const double value = objective(grid[i]);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  double a = grid[std::max(0, best - 1)];
  double b = grid[std::min(coarse - 1, best + 1)];
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - golden * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + golden * (b - a);
      f2 = objective(x2);
    }
  }
  point.tau = 0.5 * (a + b);
  point.stable = true;
  return point;
}

}  // namespace

TauSweepResult sweep_tau(const RunConfig& cfg) {
  if (cfg.sweep_c.empty())
    throw std::invalid_argument("sweep_tau: sweep_c is empty");
  if (cfg.orders.size() != 1)
    throw std::invalid_argument("sweep_tau: enable exactly one interaction order");
  if (cfg.case_id != CaseId::taylor_green && cfg.case_id != CaseId::shockwave)
    throw std::invalid_argument("sweep_tau: needs a taylor_green or shockwave config");

  TauSweepResult result;
  for (const double c : cfg.sweep_c) {
    RunConfig sample = cfg;
    sample.orders[0].c = c;
    sample.output_dir.clear();
    sample.snapshot_cadence = 0;
    sample.compare = CompareTarget::none;
    sample.strict = false;  // instability is a flagged sample, not an abort

    TauSweepPoint point;
    point.c = c;
    if (cfg.case_id == CaseId::taylor_green) {
      const auto report = run_case(sample);
      point.tau = report.fitted_tau;
      point.stable = !report.unstable && report.fitted_nu > 0.0;
    } else {
      point = shockwave_tau_sample(sample);
    }
    result.points.push_back(point);
  }

  std::vector<CalibrationSample> samples;
  for (const auto& point : result.points)
    if (point.stable && point.tau > 0.5) samples.push_back({point.c, point.tau});
  result.curve.samples = samples;
  result.curve.model = CurveModel::approx;
  try {
    result.curve.gamma = fit_gamma(samples);
    result.curve.pi0 = fit_pi0(samples, result.curve.gamma);
    result.curve_valid = true;
  } catch (const std::invalid_argument&) {
    result.curve_valid = false;
  }

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    {
      const fs::path path = fs::path(cfg.output_dir) / "points.csv";
      std::ofstream os(path);
      ensure_stream(os, path);
      write_tau_points_csv(os, result.points);
    }
    if (result.curve_valid) {
      const fs::path path = fs::path(cfg.output_dir) / "curve.csv";
      std::ofstream os(path);
      ensure_stream(os, path);
      write_curve_csv(os, result.curve);
    }
  }
  return result;
}

void write_tau_points_csv(std::ostream& os, std::span<const TauSweepPoint> points) {
  std::ostringstream out;
  out << std::setprecision(17) << "C,tau,stable\n";
  for (const auto& point : points)
    out << point.c << ',' << point.tau << ',' << (point.stable ? 1 : 0) << '\n';
  os << out.str();
}

std::vector<BenchRow> bench_timing(const RunConfig& cfg) {
  const auto& desc = descriptor(cfg.model);
  const bool planar = desc.dim == 2;

  double c2 = 1.0, c3 = 1.0;
  for (const auto& order : cfg.orders) {
    if (order.bodies == 2) c2 = order.c;
    if (order.bodies == 3) c3 = order.c;
  }
  const double tau = cfg.lbm_tau > 0.5 ? cfg.lbm_tau : 1.0;
  const BgkParams params{tau};
  const auto enum2 = enumerate_equivalence_classes(desc, 2);
  const auto enum3 = enumerate_equivalence_classes(desc, 3);
  const auto table2 =
      build_collision_table(desc, enum2, class_rates(desc, 2, cfg.lambda), c2);
  const auto table3 =
      build_collision_table(desc, enum3, class_rates(desc, 3, cfg.lambda), c3);

  std::vector<BenchRow> rows;
  for (const int n : cfg.bench_n) {
    int lx = n, ly = 1;
    if (planar) {
      lx = ly = std::max(3, static_cast<int>(std::llround(std::sqrt(double(n)))));
    }
    FieldState proto = make_field(cfg.model, lx, ly);
    if (planar) {
      TaylorGreenSpec spec;
      spec.kx = 2.0 * std::numbers::pi / lx;
      spec.ky = 2.0 * std::numbers::pi / ly;
      init_taylor_green(proto, spec);
    } else {
      init_sine(proto, 0.5);
    }
    const int sites = lx * ly;
    const int steps = std::max(1, 500000 / sites);

    for (const auto& solver : cfg.bench_solvers) {
      double best = std::numeric_limits<double>::infinity();
      for (int rep = 0; rep < cfg.bench_reps; ++rep) {
        FieldState work = proto;
        const auto t0 = Clock::now();
        for (int s = 0; s < steps; ++s) {
          if (solver == "lbm") {
            lbm_collide(work, params, Exec::serial);
          } else if (solver == "flga2") {
            collide(work, table2, {.exec = Exec::serial});
          } else {
            collide(work, table3, {.exec = Exec::serial});
          }
        }
        best = std::min(best, seconds_since(t0) / steps);
      }
      rows.push_back({solver, lx, ly, sites, steps, cfg.bench_reps, best});
    }
  }

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    const fs::path path = fs::path(cfg.output_dir) / "bench.csv";
    std::ofstream os(path);
    ensure_stream(os, path);
    write_bench_csv(os, rows);
  }
  return rows;
}

LogLogFit bench_fit(std::span<const BenchRow> rows, const std::string& solver) {
  std::vector<double> x, y;
  for (const auto& row : rows) {
    if (row.solver != solver || !(row.seconds_per_step > 0.0)) continue;
    x.push_back(std::log(static_cast<double>(row.sites)));
    y.push_back(std::log(row.seconds_per_step));
  }
  if (x.size() < 2) throw std::invalid_argument("bench_fit: need at least 2 sizes");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LogLogFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double predicted = intercept + fit.slope * x[i];
    ss_res += (y[i] - predicted) * (y[i] - predicted);
    ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows) {
  std::ostringstream out;
  out << std::setprecision(17) << "solver,sites,lx,ly,steps,reps,seconds_per_step\n";
  for (const auto& row : rows)
    out << row.solver << ',' << row.sites << ',' << row.lx << ',' << row.ly << ','
        << row.steps << ',' << row.reps << ',' << row.seconds_per_step << '\n';
  os << out.str();
}

namespace {

// Turn wrapped-around mass back at the chain ends: what left through the
// right end re-enters there moving left and vice versa, which is bounce-back
// walls expressed on top of the periodic shift. After a periodic stream the
// two wrapped fluxes sit exactly in f_right(0) and f_left(L-1), so the fix
// is their swap.
void reflect_chain_ends(FieldState& state) {
  const int last = state.lx - 1;
  std::swap(state.at(1, 0), state.at(2, last));
}

}  // namespace

QflgaCompareReport qflga_compare(const RunConfig& cfg) {
  if (cfg.model != Model::d1q3)
    throw std::invalid_argument("qflga_compare: needs a d1q3 config");
  if (cfg.orders.size() != 1 || cfg.orders[0].bodies != 2)
    throw std::invalid_argument("qflga_compare: needs a single pair order");
  if (cfg.lambda.size() != 1)
    throw std::invalid_argument("qflga_compare: needs a scalar rate");
  if (cfg.steps < 1) throw std::invalid_argument("qflga_compare: needs steps >= 1");

  const auto start = Clock::now();
  const double lambda = cfg.lambda[0];
  const double c = cfg.orders[0].c;
  make_layout(cfg.lx);  // validates the power-of-two length up front

  FieldState chain = make_field(Model::d1q3, cfg.lx);
  if (cfg.case_id == CaseId::shockwave) {
    // Density step without wall sites; the ends reflect via the wrap fix.
    for (int x = 0; x < cfg.lx; ++x) {
      const double rho = x < cfg.lx / 2 ? cfg.rho1 : cfg.rho2;
      const auto eq = equilibrium_d1q3(rho, 0.0);
      for (int ch = 0; ch < 3; ++ch) chain.at(ch, x) = eq[ch];
    }
  } else {
    init_uniform(chain, cfg.rho0, cfg.ux0);
  }
  const bool reflect = cfg.case_id == CaseId::shockwave;
  const double mass0 = total_mass(chain);

  const auto& desc = descriptor(Model::d1q3);
  const auto table = build_collision_table(
      desc, enumerate_equivalence_classes(desc, 2), cfg.lambda, c);
  const auto gates = collision_circuit(lambda, c);

  FieldState quantum = chain, classical = chain, scratch = chain;
  QflgaCompareReport report;
  report.per_step_difference.reserve(cfg.steps);
  for (int t = 1; t <= cfg.steps; ++t) {
    if (cfg.shots == 0) {
      quantum = qflga_step(quantum, lambda, c);
    } else {
      auto state = encode(quantum);
      apply_circuit(state, gates);
      propagate(state);
      quantum = measure_step_shots(state, cfg.shots,
                                   cfg.seed + static_cast<std::uint64_t>(t));
    }
    if (reflect) reflect_chain_ends(quantum);

    collide(classical, table, collide_options(cfg));
    stream(classical, scratch, cfg.exec);
    if (reflect) reflect_chain_ends(classical);

    double worst = 0.0;
    for (std::size_t i = 0; i < quantum.f.size(); ++i)
      worst = std::max(worst, std::abs(quantum.f[i] - classical.f[i]));
    report.per_step_difference.push_back(worst);
  }
  report.steps_run = cfg.steps;
  report.first_step_difference = report.per_step_difference.front();
  report.max_abs_difference = *std::max_element(report.per_step_difference.begin(),
                                                report.per_step_difference.end());
  report.mass_drift = std::abs(total_mass(quantum) - mass0) / mass0;
  report.total_seconds = seconds_since(start);

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    {
      const fs::path path = fs::path(cfg.output_dir) / "compare.csv";
      std::ofstream os(path);
      ensure_stream(os, path);
      os << std::setprecision(17) << "step,max_abs_difference\n";
      for (std::size_t t = 0; t < report.per_step_difference.size(); ++t)
        os << t + 1 << ',' << report.per_step_difference[t] << '\n';
    }
    {
      const fs::path path = fs::path(cfg.output_dir) / "profiles.csv";
      std::ofstream os(path);
      ensure_stream(os, path);
      os << std::setprecision(17) << "x,rho,ux,rho_ref,ux_ref\n";
      for (int x = 0; x < cfg.lx; ++x) {
        const auto mq = site_moments(quantum, x);
        const auto mc = site_moments(classical, x);
        os << x << ',' << mq.rho << ',' << mq.ux << ',' << mc.rho << ',' << mc.ux
           << '\n';
      }
    }
  }
  return report;
}

}  // namespace flga
