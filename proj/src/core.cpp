#include "flga/core.hpp"

#include <algorithm>
#include <cmath>

namespace flga {

void CollideStats::merge(const CollideStats& other) {
  clamp_events += other.clamp_events;
  worst_negative = std::min(worst_negative, other.worst_negative);
  nan_sites += other.nan_sites;
}

namespace {

struct SiteOutcome {
  double worst_rel = 0.0;  // most negative f_i / rho at this site
  bool nan = false;
};

// Sums one value per opposite-channel pair so the result does not depend on
// which member of a pair carries which value; mirroring a site then leaves
// the density (and the clamp renormalization below) bit-identical.
inline double paired_sum(const double* fs, const LatticeDescriptor& desc) {
  double total = 0.0;
  for (int ch = 0; ch < desc.q; ++ch) {
    const int opp = desc.opposite[ch];
    if (opp == ch)
      total += fs[ch];
    else if (opp > ch)
      total += fs[ch] + fs[opp];
  }
  return total;
}

inline SiteOutcome collide_site(FieldState& state, int site,
                                const CollisionTable& table,
                                const CollideOptions& opt,
                                const LatticeDescriptor& desc) {
  SiteOutcome out;
  const int q = desc.q;
  double fs[max_channels];
  for (int ch = 0; ch < q; ++ch) fs[ch] = state.at(ch, site);
  const double rho = paired_sum(fs, desc);
  if (!(rho > 0.0)) {
    out.nan = std::isnan(rho);
    return out;
  }

  const double rho_eff = opt.incompressible ? opt.rho0 : rho;
  double invk = 1.0 / rho_eff;
  for (int b = 2; b < table.bodies; ++b) invk /= rho_eff;

  double buf[max_channels] = {};
  for (const CollisionTerm& term : table.terms) {
    double p = term.coefficient * invk;
    if (term.bodies == 2) {
      p *= fs[term.in[0]] * fs[term.in[1]];
    } else {
      // value-ordered product: invariant under channel permutations
      double v[4];
      for (int b = 0; b < term.bodies; ++b) v[b] = fs[term.in[b]];
      std::sort(v, v + term.bodies);
      for (int b = 0; b < term.bodies; ++b) p *= v[b];
    }
    for (int u = 0; u < term.update_count; ++u)
      buf[term.update_channel[u]] +=
          static_cast<double>(term.update_delta[u]) * p;
  }

  double low = 0.0;
  for (int ch = 0; ch < q; ++ch) {
    fs[ch] += buf[ch];
    low = std::min(low, fs[ch]);
  }

  if (low < 0.0) {
    out.worst_rel = low / rho;
    for (int ch = 0; ch < q; ++ch)
      if (fs[ch] < 0.0) fs[ch] = 0.0;
    const double kept = paired_sum(fs, desc);
    if (kept > 0.0) {
      const double scale = rho / kept;
      for (int ch = 0; ch < q; ++ch) fs[ch] *= scale;
    }
  }
  for (int ch = 0; ch < q; ++ch) state.at(ch, site) = fs[ch];
  return out;
}

CollideStats run_pass(FieldState& state, const CollisionTable& table,
                      const CollideOptions& opt) {
  const LatticeDescriptor& desc = descriptor(state.model);
  const int n = state.sites();
  const CellKind* kind = state.kind.data();
  CollideStats stats;
  int first_bad = -1;

  if (opt.exec == Exec::parallel) {
#pragma omp parallel
    {
      CollideStats local;
      int local_bad = -1;
#pragma omp for schedule(static) nowait
      for (int site = 0; site < n; ++site) {
        if (kind[site] != CellKind::fluid) continue;
        const SiteOutcome o = collide_site(state, site, table, opt, desc);
        if (o.nan) ++local.nan_sites;
        if (o.worst_rel < -opt.negative_tolerance) {
          ++local.clamp_events;
          if (local_bad < 0) local_bad = site;
        }
        local.worst_negative = std::min(local.worst_negative, o.worst_rel);
      }
#pragma omp critical(flga_collide_stats)
      {
        stats.merge(local);
        if (local_bad >= 0 && (first_bad < 0 || local_bad < first_bad))
          first_bad = local_bad;
      }
    }
  } else {
    for (int site = 0; site < n; ++site) {
      if (kind[site] != CellKind::fluid) continue;
      const SiteOutcome o = collide_site(state, site, table, opt, desc);
      if (o.nan) ++stats.nan_sites;
      if (o.worst_rel < -opt.negative_tolerance) {
        ++stats.clamp_events;
        if (first_bad < 0) first_bad = site;
      }
      stats.worst_negative = std::min(stats.worst_negative, o.worst_rel);
    }
  }

  if (opt.strict && (stats.clamp_events > 0 || stats.nan_sites > 0))
    throw InstabilityError("collision produced negative occupation", first_bad);
  return stats;
}

}  // namespace

CollideStats collide(FieldState& state, const CollisionTable& table,
                     const CollideOptions& options) {
  return run_pass(state, table, options);
}

CollideStats collide(FieldState& state, std::span<const CollisionTable> tables,
                     const CollideOptions& options) {
  CollideStats stats;
  for (const CollisionTable& table : tables)
    stats.merge(run_pass(state, table, options));
  return stats;
}

void stream(FieldState& state, FieldState& scratch, Exec exec) {
  const LatticeDescriptor& desc = descriptor(state.model);
  const int lx = state.lx, ly = state.ly;
  if (scratch.f.size() != state.f.size()) scratch = state;

  for (int ch = 0; ch < desc.q; ++ch) {
    const int dx = desc.vx[ch], dy = desc.vy[ch];
    const double* src = state.channel(ch);
    double* dst = scratch.channel(ch);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (int y = 0; y < ly; ++y) {
      int sy = y - dy;
      if (sy < 0) sy += ly;
      if (sy >= ly) sy -= ly;
      const double* row = src + static_cast<std::size_t>(sy) * lx;
      double* out = dst + static_cast<std::size_t>(y) * lx;
      for (int x = 0; x < lx; ++x) {
        int sx = x - dx;
        if (sx < 0) sx += lx;
        if (sx >= lx) sx -= lx;
        out[x] = row[sx];
      }
    }
  }
  state.f.swap(scratch.f);
}

void apply_boundaries(FieldState& state) {
  if (!state.has_solid()) return;
  const LatticeDescriptor& desc = descriptor(state.model);
  if (std::abs(state.wall_ux) >= 1.0 || std::abs(state.wall_uy) >= 1.0)
    throw std::invalid_argument("wall speed must stay below the lattice speed");

  const int lx = state.lx, ly = state.ly;
  const double inv_cs2 = 1.0 / desc.cs2;
  double reflected[max_channels];
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      const int site = y * lx + x;
      if (state.kind[site] == CellKind::fluid) continue;
      const bool moving = state.kind[site] == CellKind::moving_wall;

      // Only links whose upstream site is fluid carry physical flux. Values
      // pulled from other solid sites (neighbouring wall cells, or walls seen
      // through the periodic wrap) are discarded: reflecting them would let
      // the walls trade mass among themselves forever, and a moving wall
      // would keep stamping its momentum correction onto that phantom mass.
      bool from_fluid[max_channels];
      double rho_w = 0.0;
      for (int ch = 0; ch < desc.q; ++ch) {
        int sx = x - desc.vx[ch];
        if (sx < 0) sx += lx;
        if (sx >= lx) sx -= lx;
        int sy = y - desc.vy[ch];
        if (sy < 0) sy += ly;
        if (sy >= ly) sy -= ly;
        from_fluid[ch] = state.kind[sy * lx + sx] == CellKind::fluid;
        if (from_fluid[ch]) rho_w += state.at(ch, site);
      }

      for (int ch = 0; ch < desc.q; ++ch) reflected[ch] = 0.0;
      for (int ch = 0; ch < desc.q; ++ch) {
        if (!from_fluid[ch]) continue;
        double value = state.at(ch, site);
        if (moving) {
          // Each correction component cancels in mass against the link
          // mirrored along that axis; near corners the partner may be
          // blocked, in which case the component is dropped so the wall
          // still creates no mass.
          const int mirror_x = desc.channel_of(-desc.vx[ch], desc.vy[ch]);
          const int mirror_y = desc.channel_of(desc.vx[ch], -desc.vy[ch]);
          double vu = 0.0;
          if (mirror_x >= 0 && from_fluid[mirror_x])
            vu += desc.vx[ch] * state.wall_ux;
          if (mirror_y >= 0 && from_fluid[mirror_y])
            vu += desc.vy[ch] * state.wall_uy;
          value -= 2.0 * desc.w[ch] * rho_w * vu * inv_cs2;
        }
        reflected[desc.opposite[ch]] = value;
      }
      for (int ch = 0; ch < desc.q; ++ch) state.at(ch, site) = reflected[ch];
    }
  }
}

CollideStats step(FieldState& state, FieldState& scratch,
                  std::span<const CollisionTable> tables,
                  const CollideOptions& options) {
  CollideStats stats = collide(state, tables, options);
  stream(state, scratch, options.exec);
  apply_boundaries(state);
  return stats;
}

}  // namespace flga
