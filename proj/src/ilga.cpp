#include "flga/ilga.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace flga {

std::int64_t SiteCounts::total() const {
  return std::accumulate(n.begin(), n.end(), std::int64_t{0});
}

std::int64_t RngStream::uniform_int(std::int64_t n) {
  if (n < 1) {
    throw std::invalid_argument("RngStream::uniform_int: empty range");
  }
  const auto r = 1 + static_cast<std::int64_t>(uniform() * static_cast<double>(n));
  return std::min(r, n);
}

int sample_channel(const SiteCounts& counts, std::int64_t r) {
  if (r < 1 || r > counts.total()) {
    throw std::invalid_argument("sample_channel: r outside [1, N]");
  }
  std::int64_t cumulative = 0;
  for (std::size_t ch = 0; ch < counts.n.size(); ++ch) {
    cumulative += counts.n[ch];
    if (r <= cumulative) return static_cast<int>(ch);
  }
  throw std::logic_error("sample_channel: cumulative walk fell through");
}

std::pair<int, int> sample_pair(const SiteCounts& counts, RngStream& rng) {
  const std::int64_t total = counts.total();
  if (total < 2) {
    throw std::invalid_argument("sample_pair: need at least two particles");
  }
  const int s1 = sample_channel(counts, rng.uniform_int(total));
  SiteCounts rest = counts;
  --rest.n[s1];
  const int s2 = sample_channel(rest, rng.uniform_int(total - 1));
  return {s1, s2};
}

const std::vector<PairOutcome>& PairTable::row(int a, int b) const {
  if (a > b) std::swap(a, b);
  return rows[static_cast<std::size_t>(a) * channels + b];
}

PairTable make_pair_table(const LatticeDescriptor& desc,
                          const CollisionTable& table) {
  if (table.bodies != 2) {
    throw std::invalid_argument("make_pair_table: expected a two-body table");
  }
  PairTable pt;
  pt.model = table.model;
  pt.channels = desc.q;
  pt.rows.resize(static_cast<std::size_t>(desc.q) * desc.q);

  for (const CollisionTerm& term : table.terms) {
    const int a = term.in[0], b = term.in[1];
    // Channel counts of the outcome multiset: input plus the term's deltas.
    std::vector<int> count(desc.q, 0);
    ++count[a];
    ++count[b];
    for (int u = 0; u < term.update_count; ++u) {
      count[term.update_channel[u]] += term.update_delta[u];
    }
    PairOutcome outcome;
    int slot = 0;
    for (int ch = 0; ch < desc.q; ++ch) {
      for (int rep = 0; rep < count[ch]; ++rep) outcome.out[slot++] = ch;
    }
    if (slot != 2) {
      throw std::logic_error("make_pair_table: outcome is not a pair");
    }
    const double orderings = a == b ? 1.0 : 2.0;
    outcome.probability = term.coefficient / orderings;
    pt.rows[static_cast<std::size_t>(a) * desc.q + b].push_back(outcome);
  }

  for (std::size_t r = 0; r < pt.rows.size(); ++r) {
    double sum = 0.0;
    for (const auto& o : pt.rows[r]) sum += o.probability;
    if (sum > 1.0 + 1e-12) {
      throw std::invalid_argument(
          "make_pair_table: outcome probabilities exceed one for pair {" +
          std::to_string(r / desc.q) + "," + std::to_string(r % desc.q) +
          "}; lower the rates");
    }
  }
  return pt;
}

SiteCounts mc_collide(SiteCounts counts, const PairTable& table,
                      std::int64_t c_int, RngStream& rng) {
  if (c_int < 0) {
    throw std::invalid_argument("mc_collide: negative collision count");
  }
  for (std::int64_t attempt = 0; attempt < c_int; ++attempt) {
    const auto [s1, s2] = sample_pair(counts, rng);
    const auto& row = table.row(s1, s2);
    if (row.empty()) continue;
    const double r = rng.uniform();
    double cumulative = 0.0;
    for (const PairOutcome& o : row) {
      cumulative += o.probability;
      if (r < cumulative) {
        --counts.n[s1];
        --counts.n[s2];
        ++counts.n[o.out[0]];
        ++counts.n[o.out[1]];
        break;
      }
    }
  }
  return counts;
}

std::vector<double> mc_expected_increment(const SiteCounts& counts,
                                          const PairTable& table) {
  const auto n_total = counts.total();
  std::vector<double> mean(counts.n.size(), 0.0);
  if (n_total < 2) return mean;
  const double denom =
      static_cast<double>(n_total) * static_cast<double>(n_total - 1);

  for (int a = 0; a < table.channels; ++a) {
    for (int b = a; b < table.channels; ++b) {
      const double na = static_cast<double>(counts.n[a]);
      const double select =
          a == b ? na * (na - 1.0) / denom
                 : 2.0 * na * static_cast<double>(counts.n[b]) / denom;
      if (select == 0.0) continue;
      for (const PairOutcome& o : table.row(a, b)) {
        const double p = select * o.probability;
        mean[a] -= p;
        mean[b] -= p;
        mean[o.out[0]] += p;
        mean[o.out[1]] += p;
      }
    }
  }
  return mean;
}

}  // namespace flga
