#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "flga/core.hpp"
#include "flga/field.hpp"
#include "flga/lbm.hpp"

using namespace flga;

namespace {

FieldState random_plane(int lx, int ly, unsigned seed) {
  auto state = make_field(Model::d2q9, lx, ly);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.02, 1.0);
  for (double& v : state.f) v = u(rng);
  return state;
}

}  // namespace

TEST_CASE("polynomial equilibrium reproduces the requested moments") {
  const auto& chain = descriptor(Model::d1q3);
  const auto& plane = descriptor(Model::d2q9);

  for (double rho : {0.3, 1.0, 2.7}) {
    for (double ux : {-0.2, 0.0, 0.15}) {
      const auto feq = lbm_feq_d1q3(rho, ux);
      double mass = 0.0, mom = 0.0;
      for (int i = 0; i < 3; ++i) {
        mass += feq[i];
        mom += feq[i] * chain.vx[i];
      }
      CHECK(mass == doctest::Approx(rho).epsilon(1e-14));
      CHECK(mom == doctest::Approx(rho * ux).epsilon(1e-13));

      for (double uy : {-0.1, 0.05}) {
        const auto feq2 = lbm_feq_d2q9(rho, ux, uy);
        double m2 = 0.0, px = 0.0, py = 0.0;
        for (int i = 0; i < 9; ++i) {
          m2 += feq2[i];
          px += feq2[i] * plane.vx[i];
          py += feq2[i] * plane.vy[i];
        }
        CHECK(m2 == doctest::Approx(rho).epsilon(1e-14));
        CHECK(px == doctest::Approx(rho * ux).epsilon(1e-13));
        CHECK(py == doctest::Approx(rho * uy).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("equilibrium at rest is the weight vector") {
  const auto& chain = descriptor(Model::d1q3);
  const auto& plane = descriptor(Model::d2q9);
  const auto f1 = lbm_feq_d1q3(1.0, 0.0);
  for (int i = 0; i < 3; ++i) CHECK(f1[i] == chain.w[i]);
  const auto f2 = lbm_feq_d2q9(1.0, 0.0, 0.0);
  for (int i = 0; i < 9; ++i) CHECK(f2[i] == plane.w[i]);
}

TEST_CASE("frozen equilibrium values") {
  // Hand-evaluated from f_i = w_i rho (1 + 3 v.u + 4.5 (v.u)^2 - 1.5 u^2)
  // at rho = 1, u = 0.1.
  const auto f = lbm_feq_d1q3(1.0, 0.1);
  CHECK(f[0] == doctest::Approx(2.0 / 3.0 * (1.0 - 0.015)).epsilon(1e-15));
  CHECK(f[1] ==
        doctest::Approx(1.0 / 6.0 * (1.0 + 0.3 + 0.045 - 0.015)).epsilon(1e-15));
  CHECK(f[2] ==
        doctest::Approx(1.0 / 6.0 * (1.0 - 0.3 + 0.045 - 0.015)).epsilon(1e-15));
}

TEST_CASE("relaxation time at or below one half is rejected") {
  auto state = make_field(Model::d1q3, 8);
  const auto feq = lbm_feq_d1q3(1.0, 0.0);
  for (int ch = 0; ch < 3; ++ch)
    for (int s = 0; s < state.sites(); ++s) state.at(ch, s) = feq[ch];

  CHECK_THROWS_AS(lbm_collide(state, BgkParams{0.5}), std::invalid_argument);
  CHECK_THROWS_AS(lbm_collide(state, BgkParams{0.2}), std::invalid_argument);
  CHECK_NOTHROW(lbm_collide(state, BgkParams{0.5001}));
}

TEST_CASE("uniform equilibrium is stationary under the full step") {
  auto state = make_field(Model::d2q9, 6, 5);
  const auto feq = lbm_feq_d2q9(0.8, 0.12, -0.07);
  for (int ch = 0; ch < 9; ++ch)
    for (int s = 0; s < state.sites(); ++s) state.at(ch, s) = feq[ch];
  auto scratch = state;

  BgkParams params{0.9};
  for (int t = 0; t < 20; ++t) lbm_step(state, scratch, params);

  for (int ch = 0; ch < 9; ++ch)
    for (int s = 0; s < state.sites(); ++s)
      CHECK(state.at(ch, s) == doctest::Approx(feq[ch]).epsilon(1e-12));
}

TEST_CASE("large relaxation time approaches the identity") {
  auto state = random_plane(5, 4, 77);
  const auto before = state.f;
  lbm_collide(state, BgkParams{1e12});
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(state.f[i] == doctest::Approx(before[i]).epsilon(1e-9));
}

TEST_CASE("BGK collision conserves site mass and momentum") {
  auto state = random_plane(7, 6, 2024);
  std::vector<SiteMoments> before(state.sites());
  for (int s = 0; s < state.sites(); ++s) before[s] = site_moments(state, s);

  lbm_collide(state, BgkParams{0.8});

  for (int s = 0; s < state.sites(); ++s) {
    const auto after = site_moments(state, s);
    CHECK(after.rho == doctest::Approx(before[s].rho).epsilon(1e-12));
    CHECK(after.rho * after.ux ==
          doctest::Approx(before[s].rho * before[s].ux).epsilon(1e-12));
    CHECK(after.rho * after.uy ==
          doctest::Approx(before[s].rho * before[s].uy).epsilon(1e-12));
  }
}

TEST_CASE("serial and parallel BGK sweeps agree bitwise") {
  auto a = random_plane(9, 8, 5150);
  auto b = a;
  lbm_collide(a, BgkParams{0.7}, Exec::serial);
  lbm_collide(b, BgkParams{0.7}, Exec::parallel);
  for (std::size_t i = 0; i < a.f.size(); ++i) CHECK(a.f[i] == b.f[i]);
}

TEST_CASE("solid sites are skipped by the BGK sweep") {
  auto state = random_plane(6, 4, 31);
  state.kind[state.index(2, 1)] = CellKind::wall;
  state.kind[state.index(4, 2)] = CellKind::moving_wall;
  // Walls hold streamed-in mass between steps; the collision must not touch it.
  const double held0 = state.at(3, state.index(2, 1));
  const double held1 = state.at(6, state.index(4, 2));

  lbm_collide(state, BgkParams{0.6});

  CHECK(state.at(3, state.index(2, 1)) == held0);
  CHECK(state.at(6, state.index(4, 2)) == held1);
}

TEST_CASE("shear decay matches the nominal BGK viscosity") {
  // A sinusoidal shear wave u_x(y) = A sin(2 pi y / L) decays as
  // exp(-nu k^2 t) with nu = (tau - 1/2)/3. Fit over a few hundred steps.
  const int L = 32;
  auto state = make_field(Model::d2q9, L, L);
  const double amp = 0.02, k = 2.0 * std::acos(-1.0) / L;
  for (int y = 0; y < L; ++y) {
    const auto feq = lbm_feq_d2q9(1.0, amp * std::sin(k * y), 0.0);
    for (int x = 0; x < L; ++x)
      for (int ch = 0; ch < 9; ++ch) state.at(ch, state.index(x, y)) = feq[ch];
  }
  auto scratch = state;
  BgkParams params{0.8};

  auto wave_amp = [&] {
    // Project u_x onto the seeded mode.
    double acc = 0.0;
    for (int y = 0; y < L; ++y) {
      const auto m = site_moments(state, state.index(0, y));
      acc += m.ux * std::sin(k * y);
    }
    return acc * 2.0 / L;
  };

  const double a0 = wave_amp();
  const int T = 400;
  for (int t = 0; t < T; ++t) lbm_step(state, scratch, params);
  const double a1 = wave_amp();

  const double nu_measured = std::log(a0 / a1) / (k * k * T);
  const double nu_nominal = (params.tau - 0.5) / 3.0;
  CHECK(nu_measured == doctest::Approx(nu_nominal).epsilon(0.02));
}
