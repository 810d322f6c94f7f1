#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "flga/lattice.hpp"

namespace flga {

// Unordered multiset of channel indices, stored sorted ascending.
using Multiset = std::vector<int>;

int net_vx(const LatticeDescriptor& desc, const Multiset& m);
int net_vy(const LatticeDescriptor& desc, const Multiset& m);
// Product of channel weights over the multiset.
double weight_product(const LatticeDescriptor& desc, const Multiset& m);
// Number of distinct orderings of the multiset, k! / prod(multiplicity!).
int ordering_count(const Multiset& m);

/**
 * @brief One mass- and momentum-conserving exchange between channel multisets.
 *
 * `in` and `out` are distinct multisets of equal size with equal net velocity.
 * A transition is undirected; the collision table instantiates both
 * directions with weight-ratio-adjusted coefficients.
 */
struct Transition {
  Multiset in, out;
};

/**
 * @brief Orbit of one transition under the lattice point group.
 *
 * Every member shares one relaxation rate. `shear_coefficient` measures how
 * strongly the class relaxes the off-diagonal momentum flux around the rest
 * state (zero for classes that only act on other moments); it is the key
 * used to order the d2q9 pair classes against the published rate vector.
 */
struct EquivalenceClass {
  std::vector<Transition> members;
  double shear_coefficient = 0.0;
};

struct ClassEnumeration {
  Model model{};
  int bodies = 0;
  bool spectators_kept = false;
  std::vector<EquivalenceClass> classes;

  int transition_count() const;
  // Distinct multisets appearing as either side of any transition.
  std::vector<Multiset> distinct_inputs() const;
};

/**
 * @brief Enumerate the k-body collision classes of a stencil.
 *
 * Finds every unordered pair {J, M} of distinct k-channel multisets with
 * equal net velocity, groups them into orbits of the point group, and
 * orders the classes canonically. Identity exchanges never appear. By
 * default a transition is dropped when a channel occurs on both sides,
 * since such an exchange is a lower-order collision with bystanders; pass
 * keep_spectators = true to retain them.
 */
ClassEnumeration enumerate_equivalence_classes(const LatticeDescriptor& desc,
                                               int bodies,
                                               bool keep_spectators = false);

/**
 * @brief One directed term of the collision kernel.
 *
 * Contributes coefficient * f[in[0]] * ... * f[in[k-1]] / rho^(k-1) to every
 * channel in `update`, signed by `delta` (net particle count change).
 */
struct CollisionTerm {
  std::array<std::int8_t, 4> in{};
  std::int8_t bodies = 0;
  std::int8_t update_count = 0;
  std::array<std::int8_t, 8> update_channel{};
  std::array<std::int8_t, 8> update_delta{};
  std::int16_t class_index = 0;
  double coefficient = 0.0;
};

/**
 * @brief Flattened, ready-to-run collision table for one interaction order.
 *
 * A directed term J -> M carries coefficient
 *     c * rate[class] * min(1, W(M) / W(J))
 * where W is the channel-weight product. Both directions of every
 * transition are present, so the table satisfies detailed balance:
 * W(J) * coeff(J->M) == W(M) * coeff(M->J).
 */
struct CollisionTable {
  Model model{};
  int bodies = 0;
  double c = 0.0;
  std::vector<double> rate;
  std::vector<CollisionTerm> terms;
};

/**
 * @brief Assemble the runtime table from an enumeration.
 *
 * `rate` must have one entry per class (a single value is broadcast).
 * For d2q9 pairs the class order produced by enumerate_equivalence_classes
 * matches the nine-component rate vector of the standard pair-collision
 * model, so published rate sets can be passed through unchanged.
 */
CollisionTable build_collision_table(const LatticeDescriptor& desc,
                                     const ClassEnumeration& enumeration,
                                     std::span<const double> rate, double c);

void write_table_csv(std::ostream& os, const LatticeDescriptor& desc,
                     const ClassEnumeration& enumeration,
                     const CollisionTable& table);

}  // namespace flga
