#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "flga/collision_table.hpp"
#include "flga/lattice.hpp"

namespace flga {

// Integer occupation numbers of a single site, one slot per channel. The
// stochastic pair-collision process on these counts is the microscopic
// model whose ensemble mean the float solver reproduces; it is kept here
// as a brute-force oracle and exercised at single-site scale only.
struct SiteCounts {
  std::vector<std::int64_t> n;

  std::int64_t total() const;
};

// Counting random stream: a seeded 64-bit engine plus a draw counter so a
// replay can be verified positionally. Uniform doubles take the top 53 bits,
// which keeps the mapping identical across platforms.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    ++draws_;
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in {1, ..., n}.
  std::int64_t uniform_int(std::int64_t n);

  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

// The cumulative-count rule: the channel s with
//     sum_{i<s} n_i < r <= sum_{i<=s} n_i,
// i.e. a uniformly chosen particle's channel. r must lie in [1, N].
int sample_channel(const SiteCounts& counts, std::int64_t r);

// Two particle draws; the second comes from the N-1 particles left after
// removing the first, so a same-channel pair needs two actual particles.
// Throws when fewer than two particles are present.
std::pair<int, int> sample_pair(const SiteCounts& counts, RngStream& rng);

struct PairOutcome {
  std::array<int, 2> out{};    // resulting channel pair, sorted
  double probability = 0.0;    // per selected input pair
};

// Per-input-pair transition probabilities. Row (a, b) with a <= b holds every
// outcome reachable from that unordered pair; whatever probability the row
// leaves unclaimed is the identity (the pair passes through unchanged).
struct PairTable {
  Model model{};
  int channels = 0;
  std::vector<std::vector<PairOutcome>> rows;  // indexed a * channels + b

  const std::vector<PairOutcome>& row(int a, int b) const;
};

// Reinterpret a two-body collision table as per-attempt probabilities.
//
// A directed coefficient c applies to the unordered input pair, which the
// ordered two-particle draw selects ordering_count times more often than the
// mean-field product form counts it; dividing by that multiplicity makes the
// attempt mean match the float increment exactly in the large-N limit.
// Build the source table with c = 1 so one attempt is one collision
// iteration. Throws when any row's total probability exceeds one, which
// bounds the usable rates (the probabilistic regime of the integer model).
PairTable make_pair_table(const LatticeDescriptor& desc,
                          const CollisionTable& table);

// C_int sampled pair collisions. Mass and channel momentum are conserved
// exactly in integer arithmetic; counts never go negative because only
// particles actually present are ever moved.
SiteCounts mc_collide(SiteCounts counts, const PairTable& table,
                      std::int64_t c_int, RngStream& rng);

// Exact one-attempt mean increment per channel at finite N, using the
// without-replacement pair-selection probabilities
//     P{a,b} = 2 n_a n_b / (N (N-1)),   P{a,a} = n_a (n_a - 1) / (N (N-1)).
// The gap between this and the float increment is the O(1/N) sampling bias,
// which oracle comparisons must allow for on top of the Monte Carlo error.
std::vector<double> mc_expected_increment(const SiteCounts& counts,
                                          const PairTable& table);

}  // namespace flga
