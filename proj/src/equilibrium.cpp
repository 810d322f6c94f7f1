#include "flga/equilibrium.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flga {

std::array<double, 3> equilibrium_d1q3(double rho, double ux) {
  const double s = std::sqrt(1.0 + 3.0 * ux * ux) - 1.0;
  return {rho * (2.0 / 3.0) * (1.0 - s),
          rho * (1.0 / 6.0) * (1.0 + 3.0 * ux + 2.0 * s),
          rho * (1.0 / 6.0) * (1.0 - 3.0 * ux + 2.0 * s)};
}

std::array<double, 9> equilibrium_d2q9(double rho, double ux, double uy) {
  const LatticeDescriptor& desc = descriptor(Model::d2q9);
  const std::array<double, 3> gx = equilibrium_d1q3(rho, ux);
  const std::array<double, 3> gy = equilibrium_d1q3(1.0, uy);
  // chain-factor index for a velocity component: 0 -> rest, +1 -> 1, -1 -> 2
  const auto axis = [](int v) { return v == 0 ? 0 : (v > 0 ? 1 : 2); };
  std::array<double, 9> f{};
  for (int ch = 0; ch < desc.q; ++ch)
    f[ch] = gx[axis(desc.vx[ch])] * gy[axis(desc.vy[ch])];
  return f;
}

void init_uniform(FieldState& state, double rho, double ux, double uy) {
  const int n = state.sites();
  if (state.model == Model::d1q3) {
    const std::array<double, 3> f = equilibrium_d1q3(rho, ux);
    for (int ch = 0; ch < 3; ++ch)
      for (int site = 0; site < n; ++site)
        state.at(ch, site) = state.kind[site] == CellKind::fluid ? f[ch] : 0.0;
  } else {
    const std::array<double, 9> f = equilibrium_d2q9(rho, ux, uy);
    for (int ch = 0; ch < 9; ++ch)
      for (int site = 0; site < n; ++site)
        state.at(ch, site) = state.kind[site] == CellKind::fluid ? f[ch] : 0.0;
  }
}

void init_sine(FieldState& state, double bias) {
  if (state.model != Model::d1q3)
    throw std::invalid_argument("sine pulse is a chain initialiser");
  if (bias < -1.0 || bias > 1.0)
    throw std::invalid_argument("channel bias must lie in [-1, 1]");
  for (int x = 0; x < state.lx; ++x) {
    const double envelope = std::sin(std::numbers::pi * x / state.lx) / 3.0;
    const double right = 0.5 * (1.0 + bias) * envelope;
    const double left = 0.5 * (1.0 - bias) * envelope;
    state.at(0, x) = 1.0 - right - left;
    state.at(1, x) = right;
    state.at(2, x) = left;
  }
}

void init_shockwave(FieldState& state, double rho1, double rho2) {
  if (state.model != Model::d1q3)
    throw std::invalid_argument("density step is a chain initialiser");
  state.kind.assign(state.kind.size(), CellKind::fluid);
  state.kind.front() = CellKind::wall;
  state.kind.back() = CellKind::wall;
  for (int x = 0; x < state.lx; ++x) {
    const std::array<double, 3> f =
        equilibrium_d1q3(x < state.lx / 2 ? rho1 : rho2, 0.0);
    const bool fluid = state.kind[x] == CellKind::fluid;
    for (int ch = 0; ch < 3; ++ch) state.at(ch, x) = fluid ? f[ch] : 0.0;
  }
}

namespace {

TaylorGreenSpec resolved(int lx, int ly, TaylorGreenSpec spec) {
  if (spec.kx == 0.0) spec.kx = 2.0 * std::numbers::pi / lx;
  if (spec.ky == 0.0) spec.ky = 2.0 * std::numbers::pi / ly;
  return spec;
}

}  // namespace

AnalyticField taylor_green_analytic(int lx, int ly, const TaylorGreenSpec& raw,
                                    double nu, double t) {
  const TaylorGreenSpec spec = resolved(lx, ly, raw);
  const double decay = std::exp(-nu * (spec.kx * spec.kx + spec.ky * spec.ky) * t);
  const double ax = std::sqrt(spec.ky / spec.kx);
  const double ay = std::sqrt(spec.kx / spec.ky);
  AnalyticField out;
  out.rho.resize(static_cast<std::size_t>(lx) * ly);
  out.ux.resize(out.rho.size());
  out.uy.resize(out.rho.size());
  for (int y = 0; y < ly; ++y)
    for (int x = 0; x < lx; ++x) {
      const std::size_t site = static_cast<std::size_t>(y) * lx + x;
      out.ux[site] = -spec.u_max * ax * std::cos(spec.kx * x) *
                     std::sin(spec.ky * y) * decay;
      out.uy[site] = spec.u_max * ay * std::sin(spec.kx * x) *
                     std::cos(spec.ky * y) * decay;
      const double pressure = -0.25 * spec.rho0 * spec.u_max * spec.u_max *
                              ((spec.ky / spec.kx) * std::cos(2.0 * spec.kx * x) +
                               (spec.kx / spec.ky) * std::cos(2.0 * spec.ky * y)) *
                              decay * decay;
      out.rho[site] = spec.rho0 + 3.0 * pressure;
    }
  return out;
}

void init_taylor_green(FieldState& state, const TaylorGreenSpec& spec) {
  if (state.model != Model::d2q9)
    throw std::invalid_argument("vortex initialiser needs the d2q9 stencil");
  const AnalyticField a = taylor_green_analytic(state.lx, state.ly, spec, 0.0, 0.0);
  for (int site = 0; site < state.sites(); ++site) {
    const std::array<double, 9> f =
        equilibrium_d2q9(a.rho[site], a.ux[site], a.uy[site]);
    for (int ch = 0; ch < 9; ++ch) state.at(ch, site) = f[ch];
  }
}

}  // namespace flga
