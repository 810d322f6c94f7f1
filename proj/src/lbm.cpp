#include "flga/lbm.hpp"

#include <stdexcept>

namespace flga {

namespace {

inline void feq_site(const LatticeDescriptor& desc, double rho, double ux,
                     double uy, double* out) {
  const double usq = 1.5 * (ux * ux + uy * uy);
  for (int ch = 0; ch < desc.q; ++ch) {
    const double vu = desc.vx[ch] * ux + desc.vy[ch] * uy;
    out[ch] = desc.w[ch] * rho * (1.0 + 3.0 * vu + 4.5 * vu * vu - usq);
  }
}

inline void relax_site(FieldState& state, int site,
                       const LatticeDescriptor& desc, double inv_tau) {
  double fs[max_channels];
  double rho = 0.0, mx = 0.0, my = 0.0;
  for (int ch = 0; ch < desc.q; ++ch) {
    fs[ch] = state.at(ch, site);
    rho += fs[ch];
    mx += fs[ch] * desc.vx[ch];
    my += fs[ch] * desc.vy[ch];
  }
  if (!(rho > 0.0)) return;
  double feq[max_channels];
  feq_site(desc, rho, mx / rho, my / rho, feq);
  for (int ch = 0; ch < desc.q; ++ch)
    state.at(ch, site) = fs[ch] - (fs[ch] - feq[ch]) * inv_tau;
}

}  // namespace

std::array<double, 3> lbm_feq_d1q3(double rho, double ux) {
  std::array<double, 3> f{};
  feq_site(descriptor(Model::d1q3), rho, ux, 0.0, f.data());
  return f;
}

std::array<double, 9> lbm_feq_d2q9(double rho, double ux, double uy) {
  std::array<double, 9> f{};
  feq_site(descriptor(Model::d2q9), rho, ux, uy, f.data());
  return f;
}

void lbm_collide(FieldState& state, const BgkParams& params, Exec exec) {
  if (!(params.tau > 0.5))
    throw std::invalid_argument("BGK relaxation time must exceed 0.5");
  const LatticeDescriptor& desc = descriptor(state.model);
  const int n = state.sites();
  const CellKind* kind = state.kind.data();
  const double inv_tau = 1.0 / params.tau;
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (int site = 0; site < n; ++site) {
    if (kind[site] != CellKind::fluid) continue;
    relax_site(state, site, desc, inv_tau);
  }
}

void lbm_step(FieldState& state, FieldState& scratch, const BgkParams& params,
              Exec exec) {
  lbm_collide(state, params, exec);
  stream(state, scratch, exec);
  apply_boundaries(state);
}

}  // namespace flga
