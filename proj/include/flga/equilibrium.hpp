#pragma once

#include <array>

#include "flga/field.hpp"

namespace flga {

/**
 * @brief Local equilibrium of the three-speed chain.
 *
 * Returns {f_rest, f_right, f_left} for density rho and mean velocity ux:
 *   f_i = rho * w_i * (1 + 3 v_i ux + (3|v_i| - 1) * (sqrt(1 + 3 ux^2) - 1)).
 * This is a true fixed point of the pair-collision kernel: the identity
 * (1 + 2s)^2 - 9 ux^2 = (1 - s)^2 with s = sqrt(1 + 3 ux^2) - 1 makes
 * f_right * f_left == f_rest^2 / 16 hold for every ux, unlike the quadratic
 * expansion used by single-relaxation-time solvers.
 */
std::array<double, 3> equilibrium_d1q3(double rho, double ux);

// Tensor product of two chain equilibria, one per axis (the x factor carries
// rho, the y factor is evaluated at density 1). Exact fixed point of every
// weight-ratio collision table on the d2q9 stencil.
std::array<double, 9> equilibrium_d2q9(double rho, double ux, double uy);

// Equilibrium at (rho, u) on every fluid site.
void init_uniform(FieldState& state, double rho, double ux = 0.0, double uy = 0.0);

/**
 * @brief Half-sine momentum pulse on a chain with unit mass per site.
 *
 * One third of each site's mass is mobile, scaled by the sin(pi x / L)
 * envelope and split between the right and left channels as (1 + bias)/2
 * and (1 - bias)/2; the rest channel carries the remainder. Not an
 * equilibrium; used to watch the collision operator relax.
 * bias outside [-1, 1] is an error.
 */
void init_sine(FieldState& state, double bias);

/**
 * @brief Resting density step between impermeable walls.
 *
 * Both end sites become bounce-back walls. Fluid sites carry the chain
 * equilibrium at rest: density rho1 on x < lx/2 and rho2 on the right half.
 */
void init_shockwave(FieldState& state, double rho1, double rho2);

struct TaylorGreenSpec {
  double u_max = 0.1;
  double rho0 = 1.0;
  double kx = 0.0, ky = 0.0;  // wavenumbers; 0 means 2*pi/extent
};

struct AnalyticField {
  std::vector<double> rho, ux, uy;
};

/**
 * @brief Decaying-vortex analytic solution at time t.
 *
 *   u_x = -u_max sqrt(ky/kx) cos(kx x) sin(ky y) D(t)
 *   u_y = +u_max sqrt(kx/ky) sin(kx x) cos(ky y) D(t)
 *   P   = -(rho0 u_max^2 / 4) [ky/kx cos(2 kx x) + kx/ky cos(2 ky y)] D(t)^2
 * with D(t) = exp(-nu (kx^2 + ky^2) t) and rho = rho0 + P / cs^2. For
 * kx = ky the amplitude ratio is exp(-2 nu k^2 t).
 */
AnalyticField taylor_green_analytic(int lx, int ly, const TaylorGreenSpec& spec,
                                    double nu, double t);

// Equilibrium initialisation on the analytic t = 0 vortex field (periodic).
void init_taylor_green(FieldState& state, const TaylorGreenSpec& spec);

}  // namespace flga
