#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "flga/collision_table.hpp"
#include "flga/field.hpp"

namespace flga {

enum class Exec { serial, parallel };

struct CollideOptions {
  Exec exec = Exec::parallel;
  // Throw InstabilityError on genuine negativity instead of repairing it.
  bool strict = false;
  // Replace the per-site density in the normalization by a global constant.
  bool incompressible = false;
  double rho0 = 1.0;
  // Dips below -tolerance * rho count as instability events; shallower ones
  // are treated as roundoff and clamped silently.
  double negative_tolerance = 1e-12;
};

class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, int site) : std::runtime_error(what), site_(site) {}
  int site() const { return site_; }

 private:
  int site_;
};

struct CollideStats {
  long long clamp_events = 0;  // sites that produced a genuine negative value
  double worst_negative = 0.0; // most negative f_i / rho encountered
  long long nan_sites = 0;
  void merge(const CollideStats& other);
  bool clean() const { return clamp_events == 0 && nan_sites == 0; }
};

/**
 * @brief Apply one precomputed collision table to every fluid site.
 *
 * Per site, each directed term contributes
 *     coefficient * (prod of f over its input channels) / rho^(k-1)
 * to its update channels, signed by the occupation change. All increments
 * are evaluated on the pre-collision distribution and applied at once, so
 * the result is independent of term order and site partitioning. Sites with
 * rho <= 0 and solid sites are left untouched.
 *
 * Negative results are clamped to zero and the site mass renormalized; dips
 * beyond options.negative_tolerance are counted (or thrown in strict mode).
 * Mass and momentum are conserved to roundoff otherwise.
 */
CollideStats collide(FieldState& state, const CollisionTable& table,
                     const CollideOptions& options = {});

// Tables applied sequentially in ascending body count, each a full pass
// (clamping included) before the next begins.
CollideStats collide(FieldState& state, std::span<const CollisionTable> tables,
                     const CollideOptions& options = {});

/**
 * @brief Periodic pull streaming: f_i(x) <- f_i(x - v_i), toroidal wrap.
 *
 * scratch provides the double buffer; it is resized to match and holds the
 * pre-stream values afterwards. Walls receive mass like any other site;
 * apply_boundaries turns it around.
 */
void stream(FieldState& state, FieldState& scratch, Exec exec = Exec::parallel);

/**
 * @brief Reflect fluid-sourced channels into their opposites at solid sites.
 *
 * Full-link bounce-back: mass streamed into a wall site from the fluid
 * leaves it again, reversed, on the next streaming step. Channels whose
 * upstream site is itself solid are zeroed rather than reflected, so walls
 * never exchange mass with each other. moving_wall sites additionally apply
 * f_opp(i) += -2 w_i rho_w (v_i . u_wall) / cs^2 with rho_w the mass that
 * arrived from the fluid, injecting tangential momentum (lid drive). Each
 * component of that correction is kept only when the link mirrored along its
 * axis is also open to the fluid, so the corrections cancel in mass exactly
 * even beside corners. Walls moving at |u| >= 1 are an error.
 */
void apply_boundaries(FieldState& state);

// One collide / stream / apply_boundaries cycle.
CollideStats step(FieldState& state, FieldState& scratch,
                  std::span<const CollisionTable> tables,
                  const CollideOptions& options = {});

}  // namespace flga
