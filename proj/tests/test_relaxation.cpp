#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "flga/core.hpp"
#include "flga/equilibrium.hpp"

using namespace flga;

namespace {

// Applies the linearized collision operator to a zero-sum mode vector by a
// central difference around the resting equilibrium. The difference is exact
// for quadratic (pair) tables; for cubic tables the h^2 term is negligible.
std::array<double, 9> linearized_apply(const CollisionTable& table,
                                       const std::vector<double>& mode,
                                       double h = 1e-5) {
  const Model m = table.model;
  const int q = descriptor(m).q;
  const auto increment = [&](double sign) {
    FieldState s = make_field(m, 1, 1);
    const auto feq = (m == Model::d1q3)
                         ? std::array<double, 9>{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}
                         : [] {
                             std::array<double, 9> r{};
                             const auto f = equilibrium_d2q9(1.0, 0.0, 0.0);
                             for (int ch = 0; ch < 9; ++ch) r[ch] = f[ch];
                             return r;
                           }();
    for (int ch = 0; ch < q; ++ch) s.at(ch, 0) = feq[ch] + sign * h * mode[ch];
    FieldState before = s;
    collide(s, table, {.exec = Exec::serial});
    std::array<double, 9> d{};
    for (int ch = 0; ch < q; ++ch) d[ch] = s.at(ch, 0) - before.at(ch, 0);
    return d;
  };
  const auto plus = increment(1.0), minus = increment(-1.0);
  std::array<double, 9> out{};
  for (int ch = 0; ch < q; ++ch) out[ch] = (plus[ch] - minus[ch]) / (2.0 * h);
  return out;
}

// Rayleigh quotient -<m, J m> / <m, m>; also checks m is an eigenvector.
double decay_rate(const CollisionTable& table, const std::vector<double>& mode,
                  bool check_eigenvector = true) {
  const auto jm = linearized_apply(table, mode);
  double num = 0.0, den = 0.0;
  for (std::size_t ch = 0; ch < mode.size(); ++ch) {
    num += mode[ch] * jm[ch];
    den += mode[ch] * mode[ch];
  }
  const double rate = -num / den;
  if (check_eigenvector) {
    for (std::size_t ch = 0; ch < mode.size(); ++ch)
      CHECK(std::abs(jm[ch] + rate * mode[ch]) <= 1e-8 * (1.0 + std::abs(rate)));
  }
  return rate;
}

CollisionTable table_for(Model m, int bodies, std::vector<double> rates,
                         double c, bool spectators = false) {
  const LatticeDescriptor& d = descriptor(m);
  const ClassEnumeration e = enumerate_equivalence_classes(d, bodies, spectators);
  if (rates.size() == 1 && e.classes.size() > 1)
    rates.assign(e.classes.size(), rates[0]);
  return build_collision_table(d, e, rates, c);
}

const std::vector<double> chain_stress = {-2.0, 1.0, 1.0};
// channels 5..8 carry vx*vy = +1,-1,+1,-1
const std::vector<double> plane_shear = {0, 0, 0, 0, 0, 1, -1, 1, -1};
// channels 1..4 carry vx^2 - vy^2 = +1,-1,+1,-1
const std::vector<double> plane_normal = {0, 1, -1, 1, -1, 0, 0, 0, 0};

}  // namespace

TEST_CASE("chain stress mode relaxes at half the pair rate") {
  const double rate = decay_rate(table_for(Model::d1q3, 2, {1.3}, 0.7), chain_stress);
  CHECK(rate == doctest::Approx(0.5 * 1.3 * 0.7).epsilon(1e-9));
}

TEST_CASE("plane stress modes relax at the unordered-sum rates") {
  SUBCASE("unit rates") {
    const CollisionTable t = table_for(Model::d2q9, 2, {1.0}, 1.0);
    CHECK(decay_rate(t, plane_shear) == doctest::Approx(25.0 / 18.0).epsilon(1e-9));
    CHECK(decay_rate(t, plane_normal) == doctest::Approx(17.0 / 18.0).epsilon(1e-9));
  }
  SUBCASE("rates scale with both knobs") {
    const CollisionTable t = table_for(Model::d2q9, 2, {0.6}, 0.5);
    CHECK(decay_rate(t, plane_shear) ==
          doctest::Approx(25.0 / 18.0 * 0.3).epsilon(1e-9));
  }
}

TEST_CASE("the published optimized rate vector is isotropic") {
  const std::vector<double> lambda_o = {15.0 / 128.0, 0.25, 0.25, 0.25, 0.25,
                                        0.25,         0.25, 0.125, 0.125};
  const CollisionTable t = table_for(Model::d2q9, 2, lambda_o, 1.0);
  const double shear = decay_rate(t, plane_shear);
  const double normal = decay_rate(t, plane_normal);
  CHECK(shear == doctest::Approx(67.0 / 288.0).epsilon(1e-10));
  CHECK(std::abs(shear - normal) <= 1e-10);
}

TEST_CASE("triplet tables report their stress rates") {
  for (bool spect : {true, false}) {
    const LatticeDescriptor& d = descriptor(Model::d2q9);
    const ClassEnumeration e = enumerate_equivalence_classes(d, 3, spect);
    if (e.classes.empty()) {
      MESSAGE("triplet enumeration (spectators=", spect, ") is empty");
      continue;
    }
    const std::vector<double> ones(e.classes.size(), 1.0);
    const CollisionTable t = build_collision_table(d, e, ones, 1.0);
    const double shear = decay_rate(t, plane_shear, false);
    const double normal = decay_rate(t, plane_normal, false);
    MESSAGE("triplet (spectators=", spect, "): classes=", e.classes.size(),
            " shear rate=", shear, " normal rate=", normal);
    CHECK(shear > 0.0);
    CHECK(normal > 0.0);
  }
}
