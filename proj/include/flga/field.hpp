#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "flga/lattice.hpp"

namespace flga {

enum class CellKind : std::uint8_t { fluid = 0, wall = 1, moving_wall = 2 };

/**
 * @brief Distribution field on a rectangular grid with per-site cell kinds.
 *
 * Storage is structure-of-arrays: channel-major, then row-major sites, so a
 * kernel sweeping one channel touches contiguous memory. For 1D models
 * ly == 1 and y indices are ignored.
 *
 * Walls are realized as solid boundary sites (full-link bounce-back): the
 * streaming step deposits mass on them and apply_boundaries reflects every
 * channel into its opposite, so the mass re-enters the fluid one step later.
 * Wall sites must start empty; collisions skip them. moving_wall sites add
 * the standard momentum correction for a wall sliding at (wall_ux, wall_uy).
 */
struct FieldState {
  Model model{};
  int lx = 0, ly = 0;
  std::vector<double> f;
  std::vector<CellKind> kind;
  double wall_ux = 0.0, wall_uy = 0.0;

  int channels() const { return descriptor(model).q; }
  int sites() const { return lx * ly; }
  int index(int x, int y = 0) const { return y * lx + x; }

  double& at(int ch, int site) { return f[static_cast<std::size_t>(ch) * sites() + site]; }
  double at(int ch, int site) const { return f[static_cast<std::size_t>(ch) * sites() + site]; }

  double* channel(int ch) { return f.data() + static_cast<std::size_t>(ch) * sites(); }
  const double* channel(int ch) const { return f.data() + static_cast<std::size_t>(ch) * sites(); }

  bool has_solid() const;
};

FieldState make_field(Model model, int lx, int ly = 1);

struct SiteMoments {
  double rho, ux, uy;
};

// Density and velocity of one site; velocity is zero where rho vanishes.
SiteMoments site_moments(const FieldState& state, int site);

struct Macroscopic {
  std::vector<double> rho, ux, uy;
};

Macroscopic macroscopic(const FieldState& state);

double total_mass(const FieldState& state);
std::array<double, 2> total_momentum(const FieldState& state);

// One row per site: x, y, rho, ux, uy, f0..f{q-1}.
void write_snapshot_csv(std::ostream& os, const FieldState& state);

// Exact-replay dump of the raw distribution array (row-major per channel).
void write_field_binary(std::ostream& os, const FieldState& state);
FieldState read_field_binary(std::istream& is);

}  // namespace flga
