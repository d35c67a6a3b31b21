#include <doctest.h>

#include <cmath>

#include "nvscope/analysis/trap.hpp"
#include "nvscope/currents.hpp"
#include "nvscope/errors.hpp"
#include "test_support.hpp"

using namespace nvscope;
using namespace nvscope::analysis;
using testsupport::Gen;

namespace {

PolarizedFieldMap blank(int nx, int ny, double pitch) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.pitch = pitch;
  g.origin = {-nx * pitch / 2, -ny * pitch / 2, 0};
  return {g, PolarizationComponent::SigmaPlus, std::vector<double>(g.size(), 0.0)};
}

/// Global argmin over pixels with a full 8-neighbourhood; ties to the lowest index.
std::pair<int, int> brute_argmin(const PolarizedFieldMap &m) {
  std::pair<int, int> best{-1, -1};
  double v = 1e300;
  for (int j = 1; j + 1 < m.grid.ny; ++j)
    for (int i = 1; i + 1 < m.grid.nx; ++i)
      if (m.at(i, j) < v) {
        v = m.at(i, j);
        best = {i, j};
      }
  return best;
}

} // namespace

TEST_CASE("trap: cone minimum and one-sided gradients") {
  auto m = blank(61, 41, 2e-6);
  const int i0 = 27, j0 = 18;
  const Vec3 r0 = m.grid.pixel_center(i0, j0);
  const double b0 = 3e-6, grad = 3.7;  // T/m = uT/um
  for (int j = 0; j < m.grid.ny; ++j)
    for (int i = 0; i < m.grid.nx; ++i)
      m.at(i, j) = b0 + grad * norm(m.grid.pixel_center(i, j) - r0);
  const auto rep = characterize_trap(m);
  CHECK(rep.i == i0);
  CHECK(rep.j == j0);
  CHECK(norm(rep.position - r0) == 0.0);
  CHECK(rep.field == doctest::Approx(b0));
  for (const auto &g : {rep.grad_u_minus, rep.grad_u_plus, rep.grad_v_minus, rep.grad_v_plus}) {
    REQUIRE(g.has_value());
    CHECK(*g == doctest::Approx(grad).epsilon(0.02));
  }
}

TEST_CASE("trap: asymmetric bowl reports different slopes below and above") {
  auto m = blank(41, 41, 1e-6);
  const int i0 = 20, j0 = 15;
  for (int j = 0; j < m.grid.ny; ++j)
    for (int i = 0; i < m.grid.nx; ++i) {
      const double du = std::abs(i - i0) * 1e-6, dv = (j - j0) * 1e-6;
      m.at(i, j) = 2.7 * du + (dv < 0 ? -3.7 * dv : 2.2 * dv);
    }
  const auto rep = characterize_trap(m);
  CHECK(*rep.grad_v_minus == doctest::Approx(3.7).epsilon(1e-9));
  CHECK(*rep.grad_v_plus == doctest::Approx(2.2).epsilon(1e-9));
  CHECK(*rep.grad_u_plus == doctest::Approx(2.7).epsilon(1e-9));
}

TEST_CASE("trap: monotone ramp and flat maps have no minimum") {
  auto m = blank(30, 20, 1e-6);
  for (int j = 0; j < m.grid.ny; ++j)
    for (int i = 0; i < m.grid.nx; ++i)
      m.at(i, j) = 1e-6 * (i + 2 * j);
  CHECK_THROWS_AS(characterize_trap(m), NotFound);
  auto flat = blank(30, 20, 1e-6);
  CHECK_THROWS_AS(characterize_trap(flat), NotFound);
}

TEST_CASE("trap: search region bounds") {
  auto m = blank(30, 20, 1e-6);
  TrapOptions opts;
  opts.region = PixelRegion{0, 0, 31, 20};
  CHECK_THROWS_AS(characterize_trap(m, opts), DomainError);
  opts.region = PixelRegion{5, 5, 5, 10};
  CHECK_THROWS_AS(characterize_trap(m, opts), DomainError);
  opts = TrapOptions{};
  opts.arm = 0;
  CHECK_THROWS_AS(characterize_trap(m, opts), DomainError);
}

TEST_CASE("trap: region restricts the search to its own minimum") {
  auto m = blank(60, 30, 1e-6);
  for (int j = 0; j < m.grid.ny; ++j)
    for (int i = 0; i < m.grid.nx; ++i)
      m.at(i, j) = std::min(1.0 + std::hypot(i - 15, j - 15), 2.0 + std::hypot(i - 45, j - 15));
  CHECK(characterize_trap(m).i == 15);
  TrapOptions opts;
  opts.region = PixelRegion{31, 0, 60, 30};
  const auto rep = characterize_trap(m, opts);
  CHECK(rep.i == 45);
  CHECK(rep.j == 15);
}

TEST_CASE("trap: two counter-propagating rings give an on-axis minimum") {
  TwoRingTrapParams p;
  p.inner_radius = 100e-6;
  p.outer_radius = 200e-6;
  const auto model = build_device(p);
  GridSpec grid;
  grid.origin = {-60e-6, 0, 40e-6};
  grid.axis_u = {1, 0, 0};
  grid.axis_v = {0, 0, 1};  // normal = u x v = -y
  grid.nx = 60;
  grid.ny = 60;
  grid.pitch = 2e-6;
  const auto fmap = evaluate_phasor_map(model, grid, SensingLayer{0.0, 0.0, 1}, 1);
  const auto frame = nv_frame_from_tilt(29.5, TiltPlane::parse("YZ"));
  const auto bmap = project_polarization(fmap, frame, PolarizationComponent::SigmaPlus);
  const auto rep = characterize_trap(bmap);
  const auto [bi, bj] = brute_argmin(bmap);
  CHECK(rep.i == bi);
  CHECK(rep.j == bj);
  CHECK(std::abs(rep.position.x) <= grid.pitch);
  // On-axis null of a^2/(a^2+z^2)^1.5 = b^2/(b^2+z^2)^1.5.
  const double k = std::pow(p.outer_radius / p.inner_radius, 4.0 / 3.0);
  const double z_null = std::sqrt((k * p.inner_radius * p.inner_radius - p.outer_radius * p.outer_radius) / (1 - k));
  CHECK(std::abs(rep.position.z - z_null) <= grid.pitch);
  for (const auto &g : {rep.grad_u_minus, rep.grad_u_plus, rep.grad_v_minus, rep.grad_v_plus}) {
    REQUIRE(g.has_value());
    CHECK(*g > 0.0);
  }
}

TEST_CASE("property: trap minimum agrees with brute-force argmin") {
  Gen g(2121);
  for (int k = 0; k < 100; ++k) {
    const int nx = g.integer(8, 50), ny = g.integer(8, 50);
    auto m = blank(nx, ny, 1e-6);
    const double ci = g.uniform(1, nx - 2), cj = g.uniform(1, ny - 2);
    const double gu = g.uniform(0.5, 5), gv = g.uniform(0.5, 5);
    const double b0 = g.uniform(0, 1e-5);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        m.at(i, j) = b0 + 1e-6 * std::hypot(gu * (i - ci), gv * (j - cj));
    const auto rep = characterize_trap(m);
    const auto [bi, bj] = brute_argmin(m);
    CHECK(rep.i == bi);
    CHECK(rep.j == bj);
  }
}
