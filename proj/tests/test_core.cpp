#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "flga/core.hpp"
#include "flga/equilibrium.hpp"

using namespace flga;

namespace {

CollisionTable pair_table(Model m, double lambda, double c) {
  const LatticeDescriptor& d = descriptor(m);
  return build_collision_table(d, enumerate_equivalence_classes(d, 2),
                               {&lambda, 1}, c);
}

FieldState random_state(Model m, int lx, int ly, unsigned seed) {
  FieldState s = make_field(m, lx, ly);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  for (double& v : s.f) v = dist(rng);
  return s;
}

}  // namespace

TEST_CASE("collision increment on a frozen chain state") {
  FieldState s = make_field(Model::d1q3, 1);
  s.at(0, 0) = 0.6;
  s.at(1, 0) = 0.25;
  s.at(2, 0) = 0.15;
  const CollisionTable t = pair_table(Model::d1q3, 1.5, 1.0);
  CollideOptions opt;
  opt.exec = Exec::serial;
  const CollideStats stats = collide(s, t, opt);
  CHECK(stats.clean());
  // flux = 1.5 * (0.25*0.15 - 0.36/16) = 0.0225 toward the rest pair
  CHECK(s.at(0, 0) == doctest::Approx(0.645).epsilon(1e-15));
  CHECK(s.at(1, 0) == doctest::Approx(0.2275).epsilon(1e-15));
  CHECK(s.at(2, 0) == doctest::Approx(0.1275).epsilon(1e-15));
}

TEST_CASE("weights are exactly stationary") {
  for (Model m : {Model::d1q3, Model::d2q9}) {
    const LatticeDescriptor& d = descriptor(m);
    FieldState s = make_field(m, 4, d.dim == 2 ? 3 : 1);
    init_uniform(s, 1.7);
    FieldState before = s;
    collide(s, pair_table(m, 1.0, 1.0));
    for (std::size_t i = 0; i < s.f.size(); ++i) CHECK(s.f[i] == before.f[i]);
  }
}

TEST_CASE("equilibrium is a fixed point of the pair collision") {
  SUBCASE("chain") {
    const CollisionTable t = pair_table(Model::d1q3, 1.3, 1.0);
    for (double rho : {0.5, 1.0, 4.0}) {
      for (double u = -0.3; u <= 0.31; u += 0.1) {
        FieldState s = make_field(Model::d1q3, 1);
        const auto f = equilibrium_d1q3(rho, u);
        for (int ch = 0; ch < 3; ++ch) s.at(ch, 0) = f[ch];
        FieldState before = s;
        collide(s, t, {.exec = Exec::serial});
        for (int ch = 0; ch < 3; ++ch)
          CHECK(std::abs(s.at(ch, 0) - before.at(ch, 0)) <= 1e-13 * rho);
      }
    }
  }
  SUBCASE("plane") {
    const CollisionTable t = pair_table(Model::d2q9, 1.0, 1.0);
    for (double rho : {0.5, 1.0, 4.0}) {
      for (auto [ux, uy] : {std::pair{0.1, -0.05}, {0.2, 0.2}, {-0.3, 0.1}}) {
        FieldState s = make_field(Model::d2q9, 1, 1);
        const auto f = equilibrium_d2q9(rho, ux, uy);
        for (int ch = 0; ch < 9; ++ch) s.at(ch, 0) = f[ch];
        FieldState before = s;
        collide(s, t, {.exec = Exec::serial});
        for (int ch = 0; ch < 9; ++ch)
          CHECK(std::abs(s.at(ch, 0) - before.at(ch, 0)) <= 1e-13 * rho);
      }
    }
  }
  SUBCASE("plane, three-body tables") {
    const LatticeDescriptor& d = descriptor(Model::d2q9);
    for (bool spect : {false, true}) {
      const ClassEnumeration e = enumerate_equivalence_classes(d, 3, spect);
      if (e.classes.empty()) continue;
      const double lambda = 1.0;
      const CollisionTable t = build_collision_table(d, e, {&lambda, 1}, 1.0);
      FieldState s = make_field(Model::d2q9, 1, 1);
      const auto f = equilibrium_d2q9(2.0, 0.15, -0.1);
      for (int ch = 0; ch < 9; ++ch) s.at(ch, 0) = f[ch];
      FieldState before = s;
      collide(s, t, {.exec = Exec::serial});
      for (int ch = 0; ch < 9; ++ch)
        CHECK(std::abs(s.at(ch, 0) - before.at(ch, 0)) <= 2e-13);
    }
  }
}

TEST_CASE("collision conserves site mass and momentum") {
  // gentle scale keeps every occupation positive, so no clamp interferes
  for (Model m : {Model::d1q3, Model::d2q9}) {
    FieldState s = random_state(m, 16, descriptor(m).dim == 2 ? 8 : 1, 42);
    const Macroscopic before = macroscopic(s);
    const CollideStats stats = collide(s, pair_table(m, 1.0, 0.3));
    REQUIRE(stats.clean());
    const LatticeDescriptor& d = descriptor(m);
    for (int site = 0; site < s.sites(); ++site) {
      const SiteMoments sm = site_moments(s, site);
      CHECK(std::abs(sm.rho - before.rho[site]) <= 1e-12 * before.rho[site]);
      CHECK(std::abs(sm.rho * sm.ux - before.rho[site] * before.ux[site]) <=
            1e-12 * before.rho[site] * static_cast<double>(d.q));
      CHECK(std::abs(sm.rho * sm.uy - before.rho[site] * before.uy[site]) <=
            1e-12 * before.rho[site] * static_cast<double>(d.q));
    }
  }
}

TEST_CASE("clamp repair keeps mass but may shed momentum") {
  FieldState s = random_state(Model::d2q9, 6, 6, 42);
  const double mass0 = total_mass(s);
  const CollideStats stats = collide(s, pair_table(Model::d2q9, 1.0, 3.0));
  CHECK(stats.clamp_events > 0);
  CHECK(total_mass(s) == doctest::Approx(mass0).epsilon(1e-12));
  for (double v : s.f) CHECK(v >= 0.0);
}

TEST_CASE("empty sites are left untouched") {
  FieldState s = make_field(Model::d1q3, 4);
  s.at(0, 2) = 0.5;  // only site 2 occupied, others rho = 0
  const CollideStats stats = collide(s, pair_table(Model::d1q3, 1.0, 1.0));
  CHECK(stats.clean());
  for (int site : {0, 1, 3})
    for (int ch = 0; ch < 3; ++ch) CHECK(s.at(ch, site) == 0.0);
  // the occupied site collides normally: rest mass splits into movers
  CHECK(s.at(0, 2) < 0.5);
  CHECK(s.at(1, 2) > 0.0);
  const SiteMoments sm = site_moments(s, 2);
  CHECK(sm.rho == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("negative occupations are clamped and reported") {
  FieldState s = make_field(Model::d1q3, 1);
  s.at(0, 0) = 0.01;
  s.at(1, 0) = 0.6;
  s.at(2, 0) = 0.39;
  const CollisionTable t = pair_table(Model::d1q3, 1.5, 10.0);
  SUBCASE("default mode repairs the site") {
    FieldState copy = s;
    const CollideStats stats = collide(copy, t, {.exec = Exec::serial});
    CHECK(stats.clamp_events == 1);
    CHECK(stats.worst_negative < 0.0);
    double mass = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
      CHECK(copy.at(ch, 0) >= 0.0);
      mass += copy.at(ch, 0);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("strict mode throws") {
    FieldState copy = s;
    CHECK_THROWS_AS(collide(copy, t, {.exec = Exec::serial, .strict = true}),
                    InstabilityError);
  }
}

TEST_CASE("constant-density shortcut changes only the normalization") {
  FieldState s = make_field(Model::d1q3, 1);
  s.at(0, 0) = 1.2;
  s.at(1, 0) = 0.5;
  s.at(2, 0) = 0.3;  // rho = 2
  FieldState a = s, b = s;
  const CollisionTable t = pair_table(Model::d1q3, 1.0, 1.0);
  collide(a, t, {.exec = Exec::serial});
  collide(b, t, {.exec = Exec::serial, .incompressible = true, .rho0 = 1.0});
  // increments scale by rho_site / rho0 = 2
  const double da = a.at(0, 0) - 1.2, db = b.at(0, 0) - 1.2;
  CHECK(db == doctest::Approx(2.0 * da).epsilon(1e-13));
}

TEST_CASE("streaming moves, wraps, conserves and inverts") {
  SUBCASE("single pulse moves right") {
    FieldState s = make_field(Model::d1q3, 8);
    FieldState scratch;
    s.at(1, 3) = 1.0;
    stream(s, scratch);
    CHECK(s.at(1, 4) == 1.0);
    CHECK(s.at(1, 3) == 0.0);
  }
  SUBCASE("periodic wrap") {
    FieldState s = make_field(Model::d1q3, 8);
    FieldState scratch;
    s.at(2, 0) = 1.0;
    stream(s, scratch);
    CHECK(s.at(2, 7) == 1.0);
  }
  SUBCASE("L applications are the identity") {
    FieldState s = random_state(Model::d2q9, 6, 5, 7);
    FieldState scratch;
    const FieldState before = s;
    for (int i = 0; i < 30; ++i) stream(s, scratch);  // lcm(6,5) = 30
    for (std::size_t i = 0; i < s.f.size(); ++i) CHECK(s.f[i] == before.f[i]);
  }
  SUBCASE("mass exactly preserved") {
    FieldState s = random_state(Model::d2q9, 9, 4, 11);
    FieldState scratch;
    const double before = total_mass(s);
    stream(s, scratch);
    CHECK(total_mass(s) == doctest::Approx(before).epsilon(1e-15));
  }
}

TEST_CASE("wall reflection") {
  SUBCASE("chain wall returns mass reversed") {
    FieldState s = make_field(Model::d1q3, 6);
    s.kind[0] = CellKind::wall;
    s.kind[5] = CellKind::wall;
    FieldState scratch;
    s.at(2, 1) = 0.7;  // left-mover next to the left wall
    stream(s, scratch);
    CHECK(s.at(2, 0) == 0.7);  // arrived on the wall
    apply_boundaries(s);
    CHECK(s.at(1, 0) == 0.7);  // reversed
    stream(s, scratch);
    CHECK(s.at(1, 1) == 0.7);  // back in the fluid
    CHECK(total_mass(s) == doctest::Approx(0.7).epsilon(1e-15));
  }
  SUBCASE("resting moving wall equals plain bounce-back") {
    FieldState a = make_field(Model::d2q9, 5, 4);
    FieldState b = a;
    for (int x = 0; x < 5; ++x) {
      a.kind[a.index(x, 3)] = CellKind::wall;
      b.kind[b.index(x, 3)] = CellKind::moving_wall;
    }
    b.wall_ux = 0.0;
    for (int x = 0; x < 5; ++x) a.at(2, a.index(x, 3)) = b.at(2, b.index(x, 3)) = 0.3;
    apply_boundaries(a);
    apply_boundaries(b);
    for (std::size_t i = 0; i < a.f.size(); ++i) CHECK(a.f[i] == b.f[i]);
  }
  SUBCASE("lid drive injects forward momentum") {
    FieldState s = make_field(Model::d2q9, 8, 6);
    for (int x = 0; x < 8; ++x) s.kind[s.index(x, 5)] = CellKind::moving_wall;
    s.wall_ux = 0.2;
    // mass arriving at the lid from the fluid below
    for (int x = 0; x < 8; ++x) {
      s.at(2, s.index(x, 5)) = 0.1;
      s.at(5, s.index(x, 5)) = 0.02;
      s.at(6, s.index(x, 5)) = 0.02;
    }
    const double mass_before = total_mass(s);
    apply_boundaries(s);
    CHECK(total_mass(s) == doctest::Approx(mass_before).epsilon(1e-13));
    CHECK(total_momentum(s)[0] > 0.0);
  }
  SUBCASE("super-lattice wall speed rejected") {
    FieldState s = make_field(Model::d2q9, 4, 4);
    s.kind[0] = CellKind::moving_wall;
    s.wall_ux = 1.0;
    CHECK_THROWS(apply_boundaries(s));
  }
}

TEST_CASE("mirror symmetry commutes with the chain step") {
  const CollisionTable t = pair_table(Model::d1q3, 1.2, 0.9);
  FieldState s = random_state(Model::d1q3, 32, 1, 123);
  const auto mirror = [](const FieldState& in) {
    FieldState out = in;
    for (int x = 0; x < in.lx; ++x) {
      const int mx = in.lx - 1 - x;
      out.at(0, mx) = in.at(0, x);
      out.at(1, mx) = in.at(2, x);
      out.at(2, mx) = in.at(1, x);
    }
    return out;
  };
  FieldState scratch;
  FieldState a = s;  // step then mirror
  step(a, scratch, {&t, 1}, {.exec = Exec::serial});
  a = mirror(a);
  FieldState b = mirror(s);  // mirror then step
  step(b, scratch, {&t, 1}, {.exec = Exec::serial});
  for (std::size_t i = 0; i < a.f.size(); ++i) CHECK(a.f[i] == b.f[i]);
}

TEST_CASE("uniform equilibrium is stationary under stepping") {
  FieldState s = make_field(Model::d2q9, 6, 6);
  init_uniform(s, 1.0, 0.0, 0.0);
  const CollisionTable t = pair_table(Model::d2q9, 1.0, 1.0);
  FieldState scratch;
  for (int n = 0; n < 10; ++n) step(s, scratch, {&t, 1});
  for (int site = 0; site < s.sites(); ++site)
    CHECK(s.at(0, site) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("serial and parallel paths agree bitwise") {
  const CollisionTable t2 = pair_table(Model::d2q9, 1.0, 0.7);
  FieldState a = random_state(Model::d2q9, 17, 9, 99);
  FieldState b = a;
  FieldState scratch;
  step(a, scratch, {&t2, 1}, {.exec = Exec::serial});
  step(b, scratch, {&t2, 1}, {.exec = Exec::parallel});
  for (std::size_t i = 0; i < a.f.size(); ++i) CHECK(a.f[i] == b.f[i]);
}

TEST_CASE("sequential tables apply in body order with their own scale") {
  const LatticeDescriptor& d = descriptor(Model::d2q9);
  const double one = 1.0;
  const CollisionTable t2 =
      build_collision_table(d, enumerate_equivalence_classes(d, 2), {&one, 1}, 0.2);
  const CollisionTable t3 = build_collision_table(
      d, enumerate_equivalence_classes(d, 3, true), {&one, 1}, 1.23);
  std::vector<CollisionTable> tables = {t2, t3};
  FieldState s = random_state(Model::d2q9, 3, 3, 5);
  FieldState manual = s;
  collide(s, {tables.data(), tables.size()}, {.exec = Exec::serial});
  collide(manual, t2, {.exec = Exec::serial});
  collide(manual, t3, {.exec = Exec::serial});
  for (std::size_t i = 0; i < s.f.size(); ++i) CHECK(s.f[i] == manual.f[i]);
}

TEST_CASE("conservation drift stays tiny over long runs") {
  FieldState s = make_field(Model::d1q3, 64);
  init_sine(s, 0.4);
  const CollisionTable t = pair_table(Model::d1q3, 1.5, 1.0);
  FieldState scratch;
  const double mass0 = total_mass(s);
  const double mom0 = total_momentum(s)[0];
  for (int n = 0; n < 2000; ++n) step(s, scratch, {&t, 1});
  CHECK(std::abs(total_mass(s) - mass0) <= 1e-10 * mass0);
  CHECK(std::abs(total_momentum(s)[0] - mom0) <= 1e-10 * mass0);
}
