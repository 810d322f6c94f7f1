#pragma once

#include <array>

#include "flga/core.hpp"
#include "flga/field.hpp"

namespace flga {

// Single-relaxation-time (BGK) parameters. tau is in time steps and must
// exceed 1/2, the zero-viscosity limit of the second-order equilibrium.
struct BgkParams {
  double tau = 1.0;
  double cs2 = 1.0 / 3.0;
};

// Second-order polynomial equilibrium
//   f_i = w_i rho (1 + 3 v_i.u + 4.5 (v_i.u)^2 - 1.5 u^2).
// Distinct from the square-root equilibrium in equilibrium.hpp: the two agree
// through O(u^2) but differ beyond, which is visible in the 2D recovery runs.
std::array<double, 3> lbm_feq_d1q3(double rho, double ux);
std::array<double, 9> lbm_feq_d2q9(double rho, double ux, double uy);

// f <- f - (f - feq)/tau at every fluid site. Throws std::invalid_argument
// for tau <= 0.5.
void lbm_collide(FieldState& state, const BgkParams& params,
                 Exec exec = Exec::parallel);

// BGK collide, then the shared streaming and wall pass from core.
void lbm_step(FieldState& state, FieldState& scratch, const BgkParams& params,
              Exec exec = Exec::parallel);

}  // namespace flga
