#include "flga/collision_table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

namespace flga {
namespace {

std::vector<Multiset> all_multisets(int q, int k) {
  std::vector<Multiset> out;
  Multiset cur(k, 0);
  while (true) {
    out.push_back(cur);
    int pos = k - 1;
    while (pos >= 0 && cur[pos] == q - 1) --pos;
    if (pos < 0) break;
    const int v = cur[pos] + 1;
    for (int i = pos; i < k; ++i) cur[i] = v;
  }
  return out;
}

bool multisets_overlap(const Multiset& a, const Multiset& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    (a[i] < b[j] ? i : j)++;
  }
  return false;
}

Multiset apply_permutation(const std::array<int, max_channels>& perm,
                           const Multiset& m) {
  Multiset out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = perm[m[i]];
  std::sort(out.begin(), out.end());
  return out;
}

Transition canonical(Multiset a, Multiset b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

bool transition_less(const Transition& x, const Transition& y) {
  return x.in != y.in ? x.in < y.in : x.out < y.out;
}

double shear_flux(const LatticeDescriptor& desc, const Multiset& m) {
  double s = 0.0;
  for (int ch : m) s += desc.vx[ch] * desc.vy[ch];
  return s;
}

// Off-diagonal momentum-flux transfer of one class, weighted by the smaller
// side's weight product. Scaled by 162 this is integral for d2q9 pairs and
// reproduces the coefficient pattern of the published nine-rate shear sum.
double class_shear_coefficient(const LatticeDescriptor& desc,
                               const EquivalenceClass& cls) {
  double total = 0.0;
  for (const Transition& t : cls.members) {
    const double ds = shear_flux(desc, t.out) - shear_flux(desc, t.in);
    total += std::min(weight_product(desc, t.in), weight_product(desc, t.out)) *
             ds * ds;
  }
  return total;
}

struct ClassTraits {
  int bracket;  // 162 * shear coefficient, rounded
  bool has_rest, has_axis, has_diag;
};

ClassTraits traits_of(const LatticeDescriptor& desc,
                      const EquivalenceClass& cls) {
  ClassTraits t{};
  t.bracket = static_cast<int>(std::lround(162.0 * cls.shear_coefficient));
  for (const Transition& tr : cls.members) {
    for (const Multiset* side : {&tr.in, &tr.out}) {
      for (int ch : *side) {
        const int speed2 = desc.vx[ch] * desc.vx[ch] + desc.vy[ch] * desc.vy[ch];
        if (speed2 == 0) t.has_rest = true;
        if (speed2 == 1) t.has_axis = true;
        if (speed2 == 2) t.has_diag = true;
      }
    }
  }
  return t;
}

// Position of a d2q9 pair class in the conventional nine-component rate
// vector. The traits separate the nine orbits uniquely.
int d2q9_pair_rate_slot(const ClassTraits& t) {
  switch (t.bracket) {
    case 8:
      return t.has_rest ? 7 : 0;
    case 4:
      return 6;
    case 2:
      return t.has_axis ? 3 : 5;
    case 1:
      return 2;
    case 0:
      if (t.has_rest) return 1;
      return t.has_diag ? 8 : 4;
    default:
      return -1;
  }
}

std::string format_multiset(const Multiset& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) s += '+';
    s += std::to_string(m[i]);
  }
  return s;
}

}  // namespace

int net_vx(const LatticeDescriptor& desc, const Multiset& m) {
  int s = 0;
  for (int ch : m) s += desc.vx[ch];
  return s;
}

int net_vy(const LatticeDescriptor& desc, const Multiset& m) {
  int s = 0;
  for (int ch : m) s += desc.vy[ch];
  return s;
}

double weight_product(const LatticeDescriptor& desc, const Multiset& m) {
  double p = 1.0;
  for (int ch : m) p *= desc.w[ch];
  return p;
}

int ordering_count(const Multiset& m) {
  int count = 1, run = 1;
  for (std::size_t i = 1; i <= m.size(); ++i) {
    if (i < m.size() && m[i] == m[i - 1]) {
      ++run;
      continue;
    }
    // multiply by C(i, run): orderings placing this run among the first i slots
    for (int r = 1; r <= run; ++r)
      count = count * static_cast<int>(i - run + r) / r;
    run = 1;
  }
  return count;
}

int ClassEnumeration::transition_count() const {
  int n = 0;
  for (const EquivalenceClass& c : classes) n += static_cast<int>(c.members.size());
  return n;
}

std::vector<Multiset> ClassEnumeration::distinct_inputs() const {
  std::set<Multiset> seen;
  for (const EquivalenceClass& c : classes)
    for (const Transition& t : c.members) {
      seen.insert(t.in);
      seen.insert(t.out);
    }
  return {seen.begin(), seen.end()};
}

ClassEnumeration enumerate_equivalence_classes(const LatticeDescriptor& desc,
                                               int bodies,
                                               bool keep_spectators) {
  if (bodies < 2 || bodies > 4)
    throw std::invalid_argument("collision order must be 2, 3 or 4");

  std::map<std::pair<int, int>, std::vector<Multiset>> by_momentum;
  for (Multiset& m : all_multisets(desc.q, bodies))
    by_momentum[{net_vx(desc, m), net_vy(desc, m)}].push_back(std::move(m));

  std::vector<Transition> transitions;
  for (const auto& [mom, group] : by_momentum)
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        if (!keep_spectators && multisets_overlap(group[i], group[j])) continue;
        transitions.push_back(canonical(group[i], group[j]));
      }
  std::sort(transitions.begin(), transitions.end(), transition_less);

  ClassEnumeration result;
  result.model = desc.model;
  result.bodies = bodies;
  result.spectators_kept = keep_spectators;

  std::set<std::pair<Multiset, Multiset>> assigned;
  for (const Transition& seed : transitions) {
    if (assigned.count({seed.in, seed.out})) continue;
    EquivalenceClass cls;
    for (const auto& perm : desc.symmetries) {
      Transition image = canonical(apply_permutation(perm, seed.in),
                                   apply_permutation(perm, seed.out));
      if (assigned.insert({image.in, image.out}).second)
        cls.members.push_back(std::move(image));
    }
    std::sort(cls.members.begin(), cls.members.end(), transition_less);
    cls.shear_coefficient = class_shear_coefficient(desc, cls);
    result.classes.push_back(std::move(cls));
  }

  if (desc.model == Model::d2q9 && bodies == 2 && !keep_spectators) {
    if (result.classes.size() != 9)
      throw std::logic_error("unexpected d2q9 pair class count");
    std::vector<EquivalenceClass> ordered(9);
    std::vector<bool> used(9, false);
    for (EquivalenceClass& cls : result.classes) {
      const int slot = d2q9_pair_rate_slot(traits_of(desc, cls));
      if (slot < 0 || used[slot])
        throw std::logic_error("d2q9 pair class does not match the rate vector");
      used[slot] = true;
      ordered[slot] = std::move(cls);
    }
    result.classes = std::move(ordered);
  }
  return result;
}

CollisionTable build_collision_table(const LatticeDescriptor& desc,
                                     const ClassEnumeration& enumeration,
                                     std::span<const double> rate, double c) {
  if (c < 0.0) throw std::invalid_argument("collision scale must be nonnegative");
  for (double r : rate)
    if (r < 0.0) throw std::invalid_argument("rates must be nonnegative");

  const std::size_t n_classes = enumeration.classes.size();
  std::vector<double> rates;
  if (rate.size() == 1)
    rates.assign(n_classes, rate[0]);
  else if (rate.size() == n_classes)
    rates.assign(rate.begin(), rate.end());
  else
    throw std::invalid_argument("rate vector size does not match class count");

  CollisionTable table;
  table.model = enumeration.model;
  table.bodies = enumeration.bodies;
  table.c = c;
  table.rate = rates;

  for (std::size_t ci = 0; ci < n_classes; ++ci) {
    for (const Transition& tr : enumeration.classes[ci].members) {
      const double w_in = weight_product(desc, tr.in);
      const double w_out = weight_product(desc, tr.out);
      const double w_min = std::min(w_in, w_out);
      for (int dir = 0; dir < 2; ++dir) {
        const Multiset& from = dir == 0 ? tr.in : tr.out;
        const Multiset& to = dir == 0 ? tr.out : tr.in;
        CollisionTerm term;
        term.bodies = static_cast<std::int8_t>(enumeration.bodies);
        term.class_index = static_cast<std::int16_t>(ci);
        term.coefficient = c * rates[ci] * (w_min / (dir == 0 ? w_in : w_out));
        for (std::size_t i = 0; i < from.size(); ++i)
          term.in[i] = static_cast<std::int8_t>(from[i]);
        std::array<int, max_channels> delta{};
        for (int ch : to) ++delta[ch];
        for (int ch : from) --delta[ch];
        for (int ch = 0; ch < desc.q; ++ch) {
          if (delta[ch] == 0) continue;
          term.update_channel[term.update_count] = static_cast<std::int8_t>(ch);
          term.update_delta[term.update_count] = static_cast<std::int8_t>(delta[ch]);
          ++term.update_count;
        }
        table.terms.push_back(term);
      }
    }
  }
  return table;
}

void write_table_csv(std::ostream& os, const LatticeDescriptor& desc,
                     const ClassEnumeration& enumeration,
                     const CollisionTable& table) {
  (void)enumeration;
  os << "class_index,in,out,coefficient\n";
  os.precision(17);
  for (const CollisionTerm& term : table.terms) {
    const Multiset in(term.in.begin(), term.in.begin() + term.bodies);
    std::array<int, max_channels> count{};
    for (int ch : in) ++count[ch];
    for (int u = 0; u < term.update_count; ++u)
      count[term.update_channel[u]] += term.update_delta[u];
    Multiset out;
    for (int ch = 0; ch < desc.q; ++ch)
      for (int r = 0; r < count[ch]; ++r) out.push_back(ch);
    os << term.class_index << ',' << format_multiset(in) << ','
       << format_multiset(out) << ',' << term.coefficient << '\n';
  }
}

}  // namespace flga
