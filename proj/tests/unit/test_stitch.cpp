#include <doctest.h>

#include <cmath>

#include "nvscope/analysis/stitch.hpp"
#include "nvscope/errors.hpp"
#include "test_support.hpp"

using namespace nvscope;
using namespace nvscope::analysis;
using testsupport::Gen;

namespace {

/// Smooth random field: a sum of Gaussian bumps, no two pixels alike.
PolarizedFieldMap textured_map(Gen &g, int nx, int ny) {
  GridSpec grid;
  grid.nx = nx;
  grid.ny = ny;
  grid.pitch = 2e-6;
  grid.origin = {-1e-4, 3e-5, 1.2e-5};
  PolarizedFieldMap m{grid, PolarizationComponent::SigmaMinus, std::vector<double>(grid.size(), 0.0)};
  for (int b = 0; b < 12; ++b) {
    const double ci = g.uniform(0, nx), cj = g.uniform(0, ny), s = g.uniform(3, 12), a = g.uniform(1e-5, 1e-4);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        m.at(i, j) += a * std::exp(-((i - ci) * (i - ci) + (j - cj) * (j - cj)) / (2 * s * s));
  }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      m.at(i, j) += 1e-7 * i + 3e-8 * j;
  return m;
}

PolarizedFieldMap cut(const PolarizedFieldMap &m, int i0, int j0, int nx, int ny) {
  PolarizedFieldMap t = m;
  t.grid.nx = nx;
  t.grid.ny = ny;
  t.grid.origin = m.grid.pixel_center(i0, j0) - m.grid.axis_u * (0.5 * m.grid.pitch) -
                  m.grid.axis_v * (0.5 * m.grid.pitch);
  t.values.clear();
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      t.values.push_back(m.at(i0 + i, j0 + j));
  return t;
}

} // namespace

TEST_CASE("stitch: a single tile is returned unchanged") {
  Gen g(1);
  const auto m = textured_map(g, 30, 20);
  const auto r = stitch({{m, 0, 0}});
  CHECK(r.map.values == m.values);
  CHECK(r.map.grid == m.grid);
  CHECK(r.offsets.front() == std::pair{0, 0});
  for (int c : r.coverage)
    CHECK(c == 1);
}

TEST_CASE("stitch: two tiles cut with exact offsets reassemble exactly") {
  Gen g(2);
  const auto m = textured_map(g, 60, 40);
  const auto a = cut(m, 0, 0, 40, 40);
  const auto b = cut(m, 24, 0, 36, 40);  // 16 columns shared
  const auto r = stitch({{a, 0, 0}, {b, 24, 0}});
  CHECK(r.map.grid.nx == 60);
  CHECK(r.map.grid.ny == 40);
  CHECK(r.map.values == m.values);
  CHECK(norm(r.map.grid.origin - m.grid.origin) < 1e-18);
  CHECK(r.coverage[r.map.grid.index(30, 5)] == 2);
  CHECK(r.coverage[r.map.grid.index(5, 5)] == 1);
}

TEST_CASE("stitch: refinement removes a 3 pixel offset error") {
  Gen g(3);
  const auto m = textured_map(g, 70, 50);
  const auto a = cut(m, 0, 0, 40, 50);
  const auto b = cut(m, 20, 0, 50, 50);
  StitchOptions opts;
  opts.refine = true;
  for (auto [di, dj] : {std::pair{3, 0}, std::pair{-3, 0}, std::pair{0, 3}, std::pair{3, -3}}) {
    const auto r = stitch({{a, 0, 0}, {b, 20 + di, dj}}, opts);
    CHECK(r.offsets[1] == std::pair{20, 0});
    CHECK(r.map.values == m.values);
  }
  const auto unrefined = stitch({{a, 0, 0}, {b, 23, 0}});
  CHECK(unrefined.map.values != m.values);
}

TEST_CASE("stitch: uncovered pixels are zero") {
  Gen g(4);
  const auto m = textured_map(g, 20, 20);
  const auto r = stitch({{m, 0, 0}, {m, 30, 25}});
  CHECK(r.map.grid.nx == 50);
  CHECK(r.map.grid.ny == 45);
  CHECK(r.map.values[r.map.grid.index(25, 2)] == 0.0);
  CHECK(r.coverage[r.map.grid.index(25, 2)] == 0);
}

TEST_CASE("stitch: inconsistent tiles are rejected") {
  Gen g(5);
  const auto m = textured_map(g, 20, 20);
  auto other = m;
  other.grid.pitch *= 2;
  CHECK_THROWS_AS(stitch({{m, 0, 0}, {other, 10, 0}}), DomainError);
  other = m;
  other.component = PolarizationComponent::SigmaPlus;
  CHECK_THROWS_AS(stitch({{m, 0, 0}, {other, 10, 0}}), DomainError);
  CHECK_THROWS_AS(stitch({}), DomainError);
}

TEST_CASE("property: stitching a composite with itself is the identity") {
  Gen g(1919);
  for (int k = 0; k < 50; ++k) {
    const auto m = textured_map(g, g.integer(5, 40), g.integer(5, 40));
    StitchOptions opts;
    opts.refine = g.coin();
    const auto r = stitch({{m, 0, 0}, {m, 0, 0}}, opts);
    CHECK(r.map.values == m.values);
    CHECK(r.offsets[1] == std::pair{0, 0});
  }
}

TEST_CASE("property: cut-and-reassemble is exact") {
  Gen g(2020);
  for (int k = 0; k < 100; ++k) {
    const int nx = g.integer(40, 90), ny = g.integer(30, 70);
    const auto m = textured_map(g, nx, ny);
    // Random grid of tiles with at least 4 pixels of overlap in each direction.
    const int cols = g.integer(1, 3), rows = g.integer(1, 3);
    std::vector<int> xs{0}, ys{0};
    for (int c = 1; c < cols; ++c)
      xs.push_back(c * nx / cols - g.integer(0, 4));
    for (int r = 1; r < rows; ++r)
      ys.push_back(r * ny / rows - g.integer(0, 4));
    std::vector<StitchTile> tiles;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const int i0 = xs[c], j0 = ys[r];
        const int i1 = c + 1 < cols ? std::min(nx, xs[c + 1] + 4 + g.integer(0, 6)) : nx;
        const int j1 = r + 1 < rows ? std::min(ny, ys[r + 1] + 4 + g.integer(0, 6)) : ny;
        tiles.push_back({cut(m, i0, j0, i1 - i0, j1 - j0), i0, j0});
      }
    // Tile order must not matter for exactness.
    std::shuffle(tiles.begin(), tiles.end(), g.engine());
    const auto res = stitch(tiles);
    CHECK(res.map.grid.nx == nx);
    CHECK(res.map.grid.ny == ny);
    CHECK(res.map.values == m.values);
  }
}
