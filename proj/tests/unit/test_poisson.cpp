#include <doctest.h>

#include <cmath>

#include "nsp/errors.hpp"
#include "nsp/poisson.hpp"
#include "nsp/profile.hpp"

using namespace nsp;
using namespace nsp::poisson;

namespace {

const profile::ShockProfile& reference() {
  static const profile::ShockProfile p = profile::solve_profile(profile::shock_speed(1.0, 0.0, 1.2));
  return p;
}

struct Sampled {
  Grid grid;
  Field v, phi;
};

Sampled sample_profile(double L, int N) {
  Sampled s{Grid(L, N), {}, {}};
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const auto q = profile::eval_profile(reference(), s.grid.x(i), 0);
    s.v.push_back(q.v);
    s.phi.push_back(q.phi);
  }
  return s;
}

Field bump(const Grid& grid, double amp, double centre, double width) {
  Field v(grid.size(), 1.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double z = (grid.x(i) - centre) / width;
    if (std::abs(z) < 1.0) v[i] += amp * std::pow(1.0 - z * z, 3);
  }
  return v;
}

}  // namespace

TEST_CASE("constant quasi-neutral state is solved in one step") {
  const Grid grid(10.0, 200);
  const double v0 = 1.3;
  const Field v(grid.size(), v0);
  const auto r = solve_phi(v, grid, {-std::log(v0), -std::log(v0)});
  CHECK(r.newton_iters <= 1);
  for (double x : r.phi) REQUIRE(std::abs(x + std::log(v0)) < 1e-14);
  CHECK(poisson_residual(v, r.phi, grid) < 1e-13);
  CHECK(trf_residual(v, r.phi, grid) < 1e-12);
  for (double f : electric_force(v, r.phi, grid)) REQUIRE(std::abs(f) < 1e-12);
}

TEST_CASE("compact bump screens with the opposite sign") {
  const Grid grid(20.0, 800);
  const Field v = bump(grid, 0.1, 0.0, 3.0);
  const auto r = solve_phi(v, grid, {0.0, 0.0});
  CHECK(r.residual_norm < 1e-10);
  CHECK(poisson_residual(v, r.phi, grid) < 1e-10);
  // More volume, fewer ions per unit mass: the potential drops under the bump.
  CHECK(r.phi[grid.size() / 2] < 0.0);
  CHECK(r.phi[grid.size() / 2] == doctest::Approx(-std::log(1.1)).epsilon(0.1));
}

TEST_CASE("residual is nondegenerate") {
  const Grid grid(10.0, 100);
  const Field v(grid.size(), 1.0);
  Field phi(grid.size(), 0.0);
  CHECK(poisson_residual(v, phi, grid) < 1e-15);
  phi[50] += 0.01;
  CHECK(poisson_residual(v, phi, grid) > 0.0);
}

TEST_CASE("potential of the sampled profile converges at second order") {
  const double L = 40.0;
  double err[2];
  for (int k = 0; k < 2; ++k) {
    const auto s = sample_profile(L, 800 << k);
    const auto r = solve_phi(s.v, s.grid, {s.phi.front(), s.phi.back()});
    CHECK(r.residual_norm < 1e-10);
    err[k] = 0.0;
    for (std::size_t i = 0; i < s.grid.size(); ++i) err[k] = std::max(err[k], std::abs(r.phi[i] - s.phi[i]));
  }
  CHECK(err[1] < err[0]);
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("rearranged identity residual on the profile is second order") {
  const double L = 60.0 / reference().endstates.delta_S;
  const auto a = sample_profile(L, 2048);
  const auto b = sample_profile(L, 4096);
  const double ra = trf_residual(a.v, a.phi, a.grid);
  const double rb = trf_residual(b.v, b.phi, b.grid);
  CHECK(ra / rb >= 3.0);
  CHECK(ra / rb <= 5.0);
}

TEST_CASE("rearranged identity residual for a smooth random volume") {
  double res[2];
  for (int k = 0; k < 2; ++k) {
    const Grid grid(30.0, 600 << k);
    Field v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i);
      v[i] = 1.0 + 0.05 * std::exp(-0.02 * x * x) * (std::sin(0.7 * x) + 0.5 * std::cos(1.3 * x + 0.4));
    }
    const auto r = solve_phi(v, grid, {0.0, 0.0});
    res[k] = trf_residual(v, r.phi, grid);
  }
  CHECK(res[0] / res[1] >= 3.0);
  CHECK(res[0] / res[1] <= 5.0);
}

TEST_CASE("electric force on the profile") {
  const auto s = sample_profile(60.0, 4800);
  const Field f = electric_force(s.v, s.phi, s.grid);
  CHECK(std::abs(f.front()) < 1e-8);
  CHECK(std::abs(f.back()) < 1e-8);
  // d/dx of the force equals (1/v)_x - phi_x / v.
  const double dx = s.grid.dx();
  const Field df = central_derivative(f, dx);
  const Field dphi = central_derivative(s.phi, dx);
  Field inv(s.v.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / s.v[i];
  const Field dinv = central_derivative(inv, dx);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 4; i + 4 < s.v.size(); ++i) {
    worst = std::max(worst, std::abs(df[i] - (dinv[i] - dphi[i] / s.v[i])));
    scale = std::max(scale, std::abs(dinv[i]));
  }
  CHECK(worst < 1e-3 * scale);
}

TEST_CASE("electric field of a constant state vanishes") {
  const Grid grid(5.0, 50);
  const Field v(grid.size(), 2.0), phi(grid.size(), -std::log(2.0));
  for (double e : electric_field(v, phi, grid)) CHECK(std::abs(e) < 1e-15);
}

TEST_CASE("warm start converges faster than the default guess") {
  const auto s = sample_profile(40.0, 800);
  const auto cold = solve_phi(s.v, s.grid, {s.phi.front(), s.phi.back()});
  const auto warm = solve_phi(s.v, s.grid, {s.phi.front(), s.phi.back()}, std::span<const double>(cold.phi));
  CHECK(warm.newton_iters <= 1);
  CHECK(warm.newton_iters <= cold.newton_iters);
}

TEST_CASE("invalid volumes are rejected") {
  const Grid grid(5.0, 50);
  Field v(grid.size(), 1.0);
  v[10] = -0.1;
  CHECK_THROWS_AS(solve_phi(v, grid, {0.0, 0.0}), NonPositiveVolume);
}

TEST_CASE("Newton reports divergence when the iteration budget is exhausted") {
  const Grid grid(20.0, 400);
  const Field v = bump(grid, 0.8, 0.0, 2.0);
  NewtonParams tight;
  tight.max_iters = 1;
  tight.tolerance = 1e-15;
  CHECK_THROWS_AS(solve_phi(v, grid, {0.0, 0.0}, std::nullopt, tight), NewtonDiverged);
}
