#include "flga/field.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace flga {

bool FieldState::has_solid() const {
  return std::any_of(kind.begin(), kind.end(),
                     [](CellKind k) { return k != CellKind::fluid; });
}

FieldState make_field(Model model, int lx, int ly) {
  const LatticeDescriptor& desc = descriptor(model);
  if (lx < 1 || ly < 1) throw std::invalid_argument("grid extents must be positive");
  if (desc.dim == 1 && ly != 1) throw std::invalid_argument("1D model needs ly == 1");
  FieldState s;
  s.model = model;
  s.lx = lx;
  s.ly = ly;
  s.f.assign(static_cast<std::size_t>(desc.q) * lx * ly, 0.0);
  s.kind.assign(static_cast<std::size_t>(lx) * ly, CellKind::fluid);
  return s;
}

SiteMoments site_moments(const FieldState& state, int site) {
  const LatticeDescriptor& desc = descriptor(state.model);
  double rho = 0.0, jx = 0.0, jy = 0.0;
  for (int ch = 0; ch < desc.q; ++ch) {
    const double v = state.at(ch, site);
    rho += v;
    jx += v * desc.vx[ch];
    jy += v * desc.vy[ch];
  }
  if (rho > 0.0) return {rho, jx / rho, jy / rho};
  return {rho, 0.0, 0.0};
}

Macroscopic macroscopic(const FieldState& state) {
  Macroscopic m;
  const int n = state.sites();
  m.rho.resize(n);
  m.ux.resize(n);
  m.uy.resize(n);
  for (int site = 0; site < n; ++site) {
    const SiteMoments sm = site_moments(state, site);
    m.rho[site] = sm.rho;
    m.ux[site] = sm.ux;
    m.uy[site] = sm.uy;
  }
  return m;
}

double total_mass(const FieldState& state) {
  double sum = 0.0;
  for (double v : state.f) sum += v;
  return sum;
}

std::array<double, 2> total_momentum(const FieldState& state) {
  const LatticeDescriptor& desc = descriptor(state.model);
  double jx = 0.0, jy = 0.0;
  const int n = state.sites();
  for (int ch = 0; ch < desc.q; ++ch) {
    double s = 0.0;
    const double* fc = state.channel(ch);
    for (int site = 0; site < n; ++site) s += fc[site];
    jx += s * desc.vx[ch];
    jy += s * desc.vy[ch];
  }
  return {jx, jy};
}

void write_snapshot_csv(std::ostream& os, const FieldState& state) {
  const int q = state.channels();
  os << "x,y,rho,ux,uy";
  for (int ch = 0; ch < q; ++ch) os << ",f" << ch;
  os << '\n';
  os.precision(17);
  for (int y = 0; y < state.ly; ++y)
    for (int x = 0; x < state.lx; ++x) {
      const int site = state.index(x, y);
      const SiteMoments sm = site_moments(state, site);
      os << x << ',' << y << ',' << sm.rho << ',' << sm.ux << ',' << sm.uy;
      for (int ch = 0; ch < q; ++ch) os << ',' << state.at(ch, site);
      os << '\n';
    }
}

namespace {
constexpr char magic[8] = {'f', 'l', 'g', 'a', 'f', '0', '1', '\n'};
}

void write_field_binary(std::ostream& os, const FieldState& state) {
  os.write(magic, sizeof magic);
  const std::int32_t header[3] = {static_cast<std::int32_t>(state.model),
                                  state.lx, state.ly};
  os.write(reinterpret_cast<const char*>(header), sizeof header);
  const double wall[2] = {state.wall_ux, state.wall_uy};
  os.write(reinterpret_cast<const char*>(wall), sizeof wall);
  os.write(reinterpret_cast<const char*>(state.kind.data()),
           static_cast<std::streamsize>(state.kind.size()));
  os.write(reinterpret_cast<const char*>(state.f.data()),
           static_cast<std::streamsize>(state.f.size() * sizeof(double)));
}

FieldState read_field_binary(std::istream& is) {
  char got[8];
  is.read(got, sizeof got);
  if (!is || !std::equal(got, got + 8, magic))
    throw std::runtime_error("not a field dump");
  std::int32_t header[3];
  is.read(reinterpret_cast<char*>(header), sizeof header);
  FieldState s = make_field(static_cast<Model>(header[0]), header[1], header[2]);
  double wall[2];
  is.read(reinterpret_cast<char*>(wall), sizeof wall);
  s.wall_ux = wall[0];
  s.wall_uy = wall[1];
  is.read(reinterpret_cast<char*>(s.kind.data()),
          static_cast<std::streamsize>(s.kind.size()));
  is.read(reinterpret_cast<char*>(s.f.data()),
          static_cast<std::streamsize>(s.f.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated field dump");
  return s;
}

}  // namespace flga
