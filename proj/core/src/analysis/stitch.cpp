#include "nvscope/analysis/stitch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nvscope/errors.hpp"

namespace nvscope::analysis {
namespace {

struct Canvas {
  int i0 = 0, j0 = 0;  // composite coordinate of canvas pixel (0, 0)
  int nx = 0, ny = 0;
  std::vector<double> mean;
  std::vector<int> count;

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j - j0) * static_cast<std::size_t>(nx) +
           static_cast<std::size_t>(i - i0);
  }
  void add(const PolarizedFieldMap &m, int oi, int oj) {
    for (int j = 0; j < m.grid.ny; ++j)
      for (int i = 0; i < m.grid.nx; ++i) {
        const auto k = index(oi + i, oj + j);
        ++count[k];
        mean[k] += (m.at(i, j) - mean[k]) / count[k];
      }
  }
};

Canvas make_canvas(const std::vector<StitchTile> &tiles,
                   const std::vector<std::pair<int, int>> &offsets, int margin) {
  int lo_i = std::numeric_limits<int>::max(), lo_j = lo_i;
  int hi_i = std::numeric_limits<int>::min(), hi_j = hi_i;
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    lo_i = std::min(lo_i, offsets[t].first);
    lo_j = std::min(lo_j, offsets[t].second);
    hi_i = std::max(hi_i, offsets[t].first + tiles[t].map.grid.nx);
    hi_j = std::max(hi_j, offsets[t].second + tiles[t].map.grid.ny);
  }
  Canvas c;
  c.i0 = lo_i - margin;
  c.j0 = lo_j - margin;
  c.nx = hi_i - lo_i + 2 * margin;
  c.ny = hi_j - lo_j + 2 * margin;
  c.mean.assign(static_cast<std::size_t>(c.nx) * static_cast<std::size_t>(c.ny), 0.0);
  c.count.assign(c.mean.size(), 0);
  return c;
}

// Normalised cross-correlation of a tile placed at (oi, oj) against covered canvas pixels.
bool ncc(const Canvas &c, const PolarizedFieldMap &m, int oi, int oj, int min_overlap,
         double &score) {
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  long n = 0;
  for (int j = 0; j < m.grid.ny; ++j)
    for (int i = 0; i < m.grid.nx; ++i) {
      const auto k = c.index(oi + i, oj + j);
      if (c.count[k] == 0)
        continue;
      const double a = c.mean[k];
      const double b = m.at(i, j);
      sa += a;
      sb += b;
      saa += a * a;
      sbb += b * b;
      sab += a * b;
      ++n;
    }
  if (n < min_overlap)
    return false;
  const double dn = static_cast<double>(n);
  const double cov = sab - sa * sb / dn;
  const double va = saa - sa * sa / dn;
  const double vb = sbb - sb * sb / dn;
  if (!(va > 0.0) || !(vb > 0.0))
    return false;
  score = cov / std::sqrt(va * vb);
  return true;
}

} // namespace

StitchResult stitch(const std::vector<StitchTile> &tiles, const StitchOptions &opts) {
  if (tiles.empty())
    throw DomainError("stitch needs at least one tile");
  if (opts.search_radius < 0 || opts.min_overlap < 1)
    throw DomainError("invalid stitch search options");
  const auto &ref = tiles.front().map;
  for (const auto &t : tiles) {
    t.map.grid.validate();
    if (t.map.values.size() != t.map.grid.size())
      throw DomainError("tile values do not match its grid");
    if (t.map.grid.pitch != ref.grid.pitch || !(t.map.grid.axis_u == ref.grid.axis_u) ||
        !(t.map.grid.axis_v == ref.grid.axis_v))
      throw DomainError("tiles have inconsistent pitch or orientation");
    if (t.map.component != ref.component)
      throw DomainError("tiles have inconsistent polarization components");
  }

  std::vector<std::pair<int, int>> offsets;
  for (const auto &t : tiles)
    offsets.emplace_back(t.offset_i, t.offset_j);

  if (opts.refine && tiles.size() > 1) {
    const int r = opts.search_radius;
    Canvas c = make_canvas(tiles, offsets, r);
    c.add(tiles[0].map, offsets[0].first, offsets[0].second);
    for (std::size_t t = 1; t < tiles.size(); ++t) {
      double best = -std::numeric_limits<double>::infinity();
      int best_di = 0, best_dj = 0, best_norm = std::numeric_limits<int>::max();
      for (int dj = -r; dj <= r; ++dj)
        for (int di = -r; di <= r; ++di) {
          double s = 0.0;
          if (!ncc(c, tiles[t].map, offsets[t].first + di, offsets[t].second + dj, opts.min_overlap, s))
            continue;
          const int norm = di * di + dj * dj;
          if (s > best || (s == best && norm < best_norm)) {
            best = s;
            best_di = di;
            best_dj = dj;
            best_norm = norm;
          }
        }
      offsets[t].first += best_di;
      offsets[t].second += best_dj;
      c.add(tiles[t].map, offsets[t].first, offsets[t].second);
    }
  }

  Canvas c = make_canvas(tiles, offsets, 0);
  for (std::size_t t = 0; t < tiles.size(); ++t)
    c.add(tiles[t].map, offsets[t].first, offsets[t].second);

  StitchResult out;
  out.map.component = ref.component;
  out.map.grid = ref.grid;
  out.map.grid.nx = c.nx;
  out.map.grid.ny = c.ny;
  out.map.grid.origin = ref.grid.origin +
                        ref.grid.axis_u * ((c.i0 - offsets[0].first) * ref.grid.pitch) +
                        ref.grid.axis_v * ((c.j0 - offsets[0].second) * ref.grid.pitch);
  out.map.values = std::move(c.mean);
  out.coverage = std::move(c.count);
  out.offsets = std::move(offsets);
  return out;
}

} // namespace nvscope::analysis
