#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flga/core.hpp"
#include "flga/lattice.hpp"

namespace flga {

enum class CaseId {
  equilibrium_1d,  // sine momentum pulse, time-averaged distributions per bias
  equilibrium_2d,  // uniform quadratic-equilibrium seed relaxing per velocity
  shockwave,       // resting density step between bounce-back walls
  taylor_green,    // decaying vortex sheet, viscosity read off the amplitude
  lid_cavity,      // three resting walls plus a sliding lid
  uniform,         // spatially constant state, conservation and timing probe
};

enum class CompareTarget { none, lbm, analytic, qflga };

CaseId case_from_string(const std::string& name);
std::string to_string(CaseId id);
CompareTarget compare_from_string(const std::string& name);
std::string to_string(CompareTarget target);

// One interaction order of the collision kernel and its rate multiplier.
struct OrderSpec {
  int bodies = 2;
  double c = 1.0;
  bool operator==(const OrderSpec&) const = default;
};

struct ConfigIssue {
  std::string key;
  std::string message;
};

// Carries every problem found in one validation pass, so a bad file reports
// all offending keys at once instead of one per invocation.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/**
 * @brief Complete description of one simulation run.
 *
 * Built from a flat key = value file plus optional override strings of the
 * same shape. Every key is typed and range-checked up front and unknown keys
 * are rejected, so a config that parses is safe to hand to the runners.
 */
struct RunConfig {
  CaseId case_id{};
  Model model{};
  int lx = 0;
  int ly = 1;
  int steps = 0;
  int warmup = 0;
  // Per-class collision rates; a single entry is broadcast to every class.
  std::vector<double> lambda{1.0};
  // Enabled interaction orders, ascending. Set by the presence of c2/c3/c4.
  std::vector<OrderSpec> orders{{2, 1.0}};
  int snapshot_cadence = -1;  // -1: dimensional default, 0: no snapshots
  std::uint64_t seed = 1;
  std::string output_dir;     // empty: compute only, no files
  CompareTarget compare{};
  double lbm_tau = 0.0;       // reference relaxation time when compare = lbm
  double rho1 = 4.0, rho2 = 2.0;            // shockwave halves
  double sweep_min = -1.0, sweep_max = 1.0; // equilibrium bias sweep
  double sweep_step = 0.1;
  double u_max = 0.1;         // vortex amplitude
  double rho0 = 1.0;          // background density
  double ux0 = 0.0, uy0 = 0.0;
  double wall_speed = 0.2;    // lid velocity
  int periods_x = 1, periods_y = 1;  // vortex cells across the box
  long long shots = 0;        // 0: exact marginals in the quantum comparison
  std::vector<double> sweep_c;        // rate multipliers for sweep_tau
  std::vector<int> bench_n{1000, 10000, 100000, 1000000};
  int bench_reps = 5;
  std::vector<std::string> bench_solvers{"lbm", "flga2", "flga3"};
  Exec exec = Exec::parallel;
  bool strict = false;
  bool incompressible = false;

  bool operator==(const RunConfig&) const = default;
};

// Snapshot interval actually used by the runners: explicit value if set,
// otherwise 10 for chains and 100 for planes.
int effective_cadence(const RunConfig& config);

/**
 * @brief Parse a flat key = value stream into a validated RunConfig.
 *
 * Blank lines and lines starting with '#' are skipped. `overrides` holds
 * extra "key=value" strings applied after the file, last writer winning;
 * duplicates within the file itself are an error. Throws ConfigError with
 * one entry per offending key (syntax, unknown key, bad value, or a
 * cross-field inconsistency such as a case / model mismatch).
 */
RunConfig parse_config(std::istream& is, std::span<const std::string> overrides = {});

RunConfig load_config(const std::string& path, std::span<const std::string> overrides = {});

// Canonical key = value form; parse_config(write_config(c)) reproduces c.
void write_config(std::ostream& os, const RunConfig& config);

}  // namespace flga
