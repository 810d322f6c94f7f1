#pragma once

#include <array>
#include <string>
#include <vector>

namespace flga {

enum class Model { d1q3, d2q9 };

inline constexpr int max_channels = 9;

/**
 * @brief Velocity set, weights and symmetry maps for one lattice stencil.
 *
 * Channel 0 is always the rest channel. For d2q9, channels 1-4 are the axis
 * directions (+x, +y, -x, -y) and channels 5-8 the diagonals (++, -+, --, +-).
 * Weights sum to one. `symmetries` holds every point-group element (mirrors
 * and right-angle rotations, identity included) as a channel permutation.
 */
struct LatticeDescriptor {
  Model model{};
  int dim = 0;
  int q = 0;
  std::array<int, max_channels> vx{};
  std::array<int, max_channels> vy{};
  std::array<double, max_channels> w{};
  std::array<int, max_channels> opposite{};
  std::vector<std::array<int, max_channels>> symmetries;
  double cs2 = 1.0 / 3.0;

  // Channel with velocity (cx, cy), or -1 if the stencil has none.
  int channel_of(int cx, int cy) const;
};

const LatticeDescriptor& descriptor(Model model);

Model model_from_string(const std::string& name);
std::string to_string(Model model);

}  // namespace flga
