#include "flga/lattice.hpp"

#include <stdexcept>

namespace flga {
namespace {

// The eight point-group elements of the square lattice as coordinate maps
// (x, y) -> (a*x + b*y, c*x + d*y). The first entry is the identity.
struct CoordMap {
  int axx, axy, ayx, ayy;
};

constexpr std::array<CoordMap, 8> square_group = {{
    {1, 0, 0, 1},    // identity
    {0, -1, 1, 0},   // rotate 90
    {-1, 0, 0, -1},  // rotate 180
    {0, 1, -1, 0},   // rotate 270
    {-1, 0, 0, 1},   // mirror x
    {1, 0, 0, -1},   // mirror y
    {0, 1, 1, 0},    // mirror diagonal
    {0, -1, -1, 0},  // mirror anti-diagonal
}};

LatticeDescriptor make_d1q3() {
  LatticeDescriptor d;
  d.model = Model::d1q3;
  d.dim = 1;
  d.q = 3;
  d.vx = {0, 1, -1};
  d.vy = {0, 0, 0};
  d.w = {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0};
  d.symmetries = {{0, 1, 2}, {0, 2, 1}};
  for (int i = 0; i < d.q; ++i) d.opposite[i] = d.channel_of(-d.vx[i], 0);
  return d;
}

LatticeDescriptor make_d2q9() {
  LatticeDescriptor d;
  d.model = Model::d2q9;
  d.dim = 2;
  d.q = 9;
  d.vx = {0, 1, 0, -1, 0, 1, -1, -1, 1};
  d.vy = {0, 0, 1, 0, -1, 1, 1, -1, -1};
  constexpr double wr = 4.0 / 9.0, wa = 1.0 / 9.0, wd = 1.0 / 36.0;
  d.w = {wr, wa, wa, wa, wa, wd, wd, wd, wd};
  for (int i = 0; i < d.q; ++i) d.opposite[i] = d.channel_of(-d.vx[i], -d.vy[i]);
  for (const CoordMap& g : square_group) {
    std::array<int, max_channels> perm{};
    for (int i = 0; i < d.q; ++i) {
      const int cx = g.axx * d.vx[i] + g.axy * d.vy[i];
      const int cy = g.ayx * d.vx[i] + g.ayy * d.vy[i];
      perm[i] = d.channel_of(cx, cy);
    }
    d.symmetries.push_back(perm);
  }
  return d;
}

}  // namespace

int LatticeDescriptor::channel_of(int cx, int cy) const {
  for (int i = 0; i < q; ++i)
    if (vx[i] == cx && vy[i] == cy) return i;
  return -1;
}

const LatticeDescriptor& descriptor(Model model) {
  static const LatticeDescriptor d1 = make_d1q3();
  static const LatticeDescriptor d2 = make_d2q9();
  return model == Model::d1q3 ? d1 : d2;
}

Model model_from_string(const std::string& name) {
  if (name == "d1q3") return Model::d1q3;
  if (name == "d2q9") return Model::d2q9;
  throw std::invalid_argument("unknown lattice model: " + name);
}

std::string to_string(Model model) {
  return model == Model::d1q3 ? "d1q3" : "d2q9";
}

}  // namespace flga
