#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flga/cases.hpp"
#include "flga/config.hpp"
#include "flga/field.hpp"

namespace fs = std::filesystem;
using namespace flga;

namespace {

RunConfig cfg_from(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("flga_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("error norms: relative l2 against a reference, max absolute") {
  const std::vector<double> v{1.0, 2.0, 3.0};
  const std::vector<double> same{1.0, 2.0, 3.0};
  const auto zero = error_norms(v, same);
  CHECK(zero.l2 == 0.0);
  CHECK(zero.max == 0.0);

  const std::vector<double> ref{2.0, 2.0, 2.0};
  const auto norms = error_norms(v, ref);
  CHECK(norms.max == doctest::Approx(1.0));
  CHECK(norms.l2 == doctest::Approx(std::sqrt(2.0 / 12.0)));

  // A vanishing reference flips the l2 norm to absolute.
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  const auto abs_norm = error_norms(v, zeros);
  CHECK(abs_norm.l2 == doctest::Approx(std::sqrt(14.0)));

  CHECK_THROWS_AS(error_norms(v, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("moving average: clamped window, constants pass through") {
  const std::vector<double> constant(20, 3.5);
  for (const double v : moving_average(constant, 7)) CHECK(v == doctest::Approx(3.5));

  const std::vector<double> ramp{0, 1, 2, 3, 4, 5, 6, 7};
  const auto copy = moving_average(ramp, 1);
  CHECK(copy == ramp);

  const auto smoothed = moving_average(ramp, 4);
  // Interior points average a full window centred on i: [i-2, i+1].
  CHECK(smoothed[3] == doctest::Approx((1 + 2 + 3 + 4) / 4.0));
  // Leading edge clamps to what exists.
  CHECK(smoothed[0] == doctest::Approx((0 + 1) / 2.0));
  CHECK(smoothed.back() == doctest::Approx((5 + 6 + 7) / 3.0));
}

TEST_CASE("chain equilibrium case: averaged distributions sit on the fixed point") {
  const auto cfg = cfg_from(
      "case = equilibrium_1d\n"
      "lx = 50\n"
      "steps = 300\n"
      "warmup = 150\n"
      "lambda = 1.5\n"
      "sweep_min = -0.6\n"
      "sweep_max = 0.6\n"
      "sweep_step = 0.6\n");
  const auto report = run_case(cfg);

  REQUIRE(report.sweep.size() == 3);
  CHECK(report.steps_run == 900);
  CHECK_FALSE(report.unstable);
  CHECK(report.clamp_events == 0);
  CHECK(report.mass_drift < 1e-12);
  CHECK(report.momentum_drift < 1e-12);
  for (const auto& point : report.sweep) {
    CHECK(point.rho == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(point.max_rel_error < 0.05);
    CHECK(point.f.size() == 3);
  }
  // The velocity ordering follows the initial bias.
  CHECK(report.sweep[0].ux < report.sweep[1].ux);
  CHECK(report.sweep[1].ux < report.sweep[2].ux);
  CHECK(report.sweep[0].ux < -0.05);
  CHECK(report.sweep[2].ux > 0.05);
}

TEST_CASE("plane equilibrium case: quadratic seed relaxes onto the square-root point") {
  const auto cfg = cfg_from(
      "case = equilibrium_2d\n"
      "lx = 8\n"
      "steps = 120\n"
      "warmup = 80\n"
      "lambda = 1\n"
      "c2 = 0.5\n"
      "sweep_min = -0.2\n"
      "sweep_max = 0.2\n"
      "sweep_step = 0.2\n");
  const auto report = run_case(cfg);

  REQUIRE(report.sweep.size() == 3);
  CHECK_FALSE(report.unstable);
  CHECK(report.mass_drift < 1e-12);
  for (std::size_t i = 0; i < report.sweep.size(); ++i) {
    const auto& point = report.sweep[i];
    // Uniform seeding leaves the momentum untouched, so the averaged
    // velocity is the requested one to roundoff.
    CHECK(point.ux == doctest::Approx(cfg.sweep_min + i * 0.2).epsilon(1e-9));
    CHECK(point.rho == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(point.max_rel_error < 0.02);
    CHECK(point.f.size() == 9);
  }
}

TEST_CASE("shockwave case: profile close to the matched reference solver") {
  const auto cfg = cfg_from(
      "case = shockwave\n"
      "lx = 256\n"
      "steps = 80\n"
      "lambda = 1.29\n"
      "c2 = 1\n"
      "compare = lbm\n"
      "lbm_tau = 2.1\n");
  const auto report = run_case(cfg);

  CHECK(report.steps_run == 80);
  CHECK_FALSE(report.unstable);
  CHECK(report.clamp_events == 0);
  CHECK(report.mass_drift < 1e-12);
  CHECK(report.density_error.l2 > 0.0);
  CHECK(report.density_error.l2 < 0.05);
  CHECK(report.velocity_error.l2 < 0.5);
}

TEST_CASE("vortex case: decay fit and analytic comparison") {
  // C = 1 keeps the vortex in the hydrodynamic regime and leaves a healthy
  // fraction of the initial amplitude at the end, so the analytic comparison
  // measures shape rather than roundoff.
  const auto cfg = cfg_from(
      "case = taylor_green\n"
      "lx = 32\n"
      "ly = 32\n"
      "steps = 100\n"
      "lambda = 1\n"
      "c2 = 1\n");
  const auto report = run_case(cfg);

  CHECK(report.steps_run == 100);
  CHECK_FALSE(report.unstable);
  CHECK(report.fitted_nu > 0.0);
  CHECK(report.fitted_tau > 0.5);
  CHECK(report.fitted_tau < 5.0);
  CHECK(report.mass_drift < 1e-12);
  CHECK(report.momentum_drift < 1e-12);
  // Analytic field rebuilt at the fitted viscosity.
  CHECK(report.velocity_error.l2 < 0.1);
  CHECK(report.density_error.l2 < 0.01);
}

TEST_CASE("lid cavity case: the moving lid drags the fluid") {
  TempDir tmp("lid");
  auto cfg = cfg_from(
      "case = lid_cavity\n"
      "lx = 20\n"
      "ly = 20\n"
      "steps = 200\n"
      "lambda = 1\n"
      "c2 = 0.2\n"
      "c3 = 1.23\n"
      "wall_speed = 0.2\n"
      "snapshot_cadence = 0\n");
  cfg.output_dir = tmp.path.string();
  const auto report = run_case(cfg);

  CHECK_FALSE(report.unstable);
  CHECK(report.mass_drift < 1e-10);
  CHECK(report.momentum_drift > 0.0);  // the lid injects momentum

  std::ifstream is(tmp.path / "final.bin", std::ios::binary);
  REQUIRE(is.good());
  const auto field = read_field_binary(is);
  const auto macro = macroscopic(field);
  // Row just below the lid moves with it.
  const int x = cfg.lx / 2;
  const double near_lid = macro.ux[field.index(x, cfg.ly - 2)];
  CHECK(near_lid > 0.0);
  const auto momentum = total_momentum(field);
  CHECK(momentum[0] > 0.0);

  CHECK(fs::exists(tmp.path / "centerline_x.csv"));
  CHECK(fs::exists(tmp.path / "centerline_y.csv"));
  CHECK(fs::exists(tmp.path / "report.txt"));
  CHECK(fs::exists(tmp.path / "config.cfg"));
}

TEST_CASE("uniform case: a flat state is exactly stationary") {
  SUBCASE("zero steps do no work") {
    const auto cfg = cfg_from(
        "case = uniform\n"
        "model = d2q9\n"
        "lx = 16\n"
        "steps = 0\n"
        "lambda = 1\n");
    const auto report = run_case(cfg);
    CHECK(report.steps_run == 0);
    CHECK(report.density_error.l2 == 0.0);
    CHECK(report.velocity_error.l2 == 0.0);
    CHECK(report.total_seconds < 1.0);
  }

  SUBCASE("a moving uniform state stays put") {
    const auto cfg = cfg_from(
        "case = uniform\n"
        "model = d2q9\n"
        "lx = 12\n"
        "steps = 100\n"
        "lambda = 1\n"
        "c2 = 0.8\n"
        "ux0 = 0.05\n"
        "uy0 = 0.02\n");
    const auto report = run_case(cfg);
    CHECK(report.mass_drift < 1e-12);
    CHECK(report.momentum_drift < 1e-12);
    CHECK(report.density_error.l2 < 1e-10);
    CHECK(report.velocity_error.l2 < 1e-10);
  }
}

TEST_CASE("quantum comparison: marginals track the classical update") {
  auto cfg = cfg_from(
      "case = shockwave\n"
      "lx = 16\n"
      "steps = 12\n"
      "lambda = 1\n"
      "c2 = 0.5\n"
      "compare = qflga\n"
      "snapshot_cadence = 0\n");

  SUBCASE("exact marginals agree to roundoff") {
    const auto report = qflga_compare(cfg);
    REQUIRE(report.per_step_difference.size() == 12);
    CHECK(report.first_step_difference < 1e-10);
    CHECK(report.max_abs_difference < 1e-9);
    CHECK(report.mass_drift < 1e-10);
  }

  SUBCASE("shot sampling conserves the encoded mass") {
    cfg.shots = 2000;
    const auto report = qflga_compare(cfg);
    CHECK(report.mass_drift < 1e-9);
    CHECK(report.max_abs_difference > 0.0);  // sampling noise is visible
  }

  SUBCASE("length must be a power of two") {
    cfg.lx = 100;
    CHECK_THROWS_AS(qflga_compare(cfg), std::invalid_argument);
  }
}

TEST_CASE("tau sweep on the vortex: stronger collisions mean faster relaxation") {
  // All three settings keep the collision rate well above the vortex
  // wavenumber; weaker couplings leave the hydrodynamic regime on a grid
  // this small and the fitted value stops tracking the collision strength.
  auto cfg = cfg_from(
      "case = taylor_green\n"
      "lx = 24\n"
      "ly = 24\n"
      "steps = 120\n"
      "lambda = 1\n"
      "c2 = 1\n"
      "sweep_c = 0.4, 0.7, 1.0\n"
      "compare = none\n");
  const auto result = sweep_tau(cfg);

  REQUIRE(result.points.size() == 3);
  for (const auto& point : result.points) CHECK(point.stable);
  CHECK(result.points[0].tau > result.points[1].tau);
  CHECK(result.points[1].tau > result.points[2].tau);
  CHECK(result.curve_valid);
  CHECK(result.curve.gamma > 0.0);
}

TEST_CASE("tau sweep on the shockwave: matched tau falls with the prefactor") {
  const auto cfg = cfg_from(
      "case = shockwave\n"
      "lx = 128\n"
      "steps = 60\n"
      "lambda = 1\n"
      "c2 = 1\n"
      "sweep_c = 0.5, 1.0\n"
      "compare = none\n");
  const auto result = sweep_tau(cfg);

  REQUIRE(result.points.size() == 2);
  CHECK(result.points[0].stable);
  CHECK(result.points[1].stable);
  CHECK(result.points[0].tau > result.points[1].tau);
}

TEST_CASE("tau sweep input checks") {
  auto cfg = cfg_from(
      "case = taylor_green\n"
      "lx = 16\n"
      "ly = 16\n"
      "steps = 50\n"
      "lambda = 1\n");
  CHECK_THROWS_AS(sweep_tau(cfg), std::invalid_argument);  // no sweep_c

  cfg.sweep_c = {0.5};
  cfg.orders = {{2, 1.0}, {3, 1.0}};
  CHECK_THROWS_AS(sweep_tau(cfg), std::invalid_argument);  // two orders

  cfg.orders = {{2, 1.0}};
  cfg.case_id = CaseId::uniform;
  CHECK_THROWS_AS(sweep_tau(cfg), std::invalid_argument);  // wrong case
}

TEST_CASE("timing harness: rows for every solver and size, triples cost more") {
  const auto cfg = cfg_from(
      "case = uniform\n"
      "model = d2q9\n"
      "lx = 16\n"
      "steps = 1\n"
      "lambda = 1\n"
      "c2 = 1\n"
      "c3 = 1\n"
      "bench_n = 256, 1024\n"
      "bench_reps = 2\n");
  const auto rows = bench_timing(cfg);

  REQUIRE(rows.size() == 6);
  for (const auto& row : rows) {
    CHECK(row.seconds_per_step > 0.0);
    CHECK(row.sites == row.lx * row.ly);
  }
  // Triple-channel tables touch far more terms per site than pair tables.
  for (std::size_t i = 0; i < rows.size(); i += 3) {
    REQUIRE(rows[i].solver == "lbm");
    REQUIRE(rows[i + 1].solver == "flga2");
    REQUIRE(rows[i + 2].solver == "flga3");
    CHECK(rows[i + 2].seconds_per_step > rows[i + 1].seconds_per_step);
  }

  const auto fit = bench_fit(rows, "flga2");
  CHECK(std::isfinite(fit.slope));
  CHECK_THROWS_AS(bench_fit(rows, "nope"), std::invalid_argument);
}

TEST_CASE("repeat runs are bit-identical") {
  TempDir tmp_a("det_a"), tmp_b("det_b");
  auto cfg = cfg_from(
      "case = taylor_green\n"
      "lx = 24\n"
      "ly = 24\n"
      "steps = 60\n"
      "lambda = 1\n"
      "c2 = 0.5\n"
      "snapshot_cadence = 0\n");

  cfg.output_dir = tmp_a.path.string();
  const auto first = run_case(cfg);
  cfg.output_dir = tmp_b.path.string();
  const auto second = run_case(cfg);

  CHECK(first.fitted_tau == second.fitted_tau);
  CHECK(first.fitted_nu == second.fitted_nu);
  CHECK(first.density_error.l2 == second.density_error.l2);
  CHECK(first.velocity_error.l2 == second.velocity_error.l2);
  CHECK(first.mass_drift == second.mass_drift);
  CHECK(first.clamp_events == second.clamp_events);

  const auto bytes_a = slurp(tmp_a.path / "final.bin");
  const auto bytes_b = slurp(tmp_b.path / "final.bin");
  REQUIRE_FALSE(bytes_a.empty());
  CHECK(bytes_a == bytes_b);
}

TEST_CASE("phase timers accumulate with the step count") {
  auto cfg = cfg_from(
      "case = uniform\n"
      "model = d2q9\n"
      "lx = 64\n"
      "ly = 64\n"
      "steps = 40\n"
      "lambda = 1\n"
      "c2 = 1\n");
  const auto short_run = run_case(cfg);
  cfg.steps = 400;
  const auto long_run = run_case(cfg);

  CHECK(short_run.collide_seconds > 0.0);
  CHECK(long_run.collide_seconds > short_run.collide_seconds);
  CHECK(long_run.stream_seconds > short_run.stream_seconds);
}
