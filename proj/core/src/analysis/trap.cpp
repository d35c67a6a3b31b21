#include "nvscope/analysis/trap.hpp"

#include <limits>
#include <vector>

#include "nvscope/errors.hpp"

namespace nvscope::analysis {
namespace {

// Least-squares slope of values against distance (pixels) times 1/pitch.
std::optional<double> slope(const PolarizedFieldMap &m, int i, int j, int di, int dj, int arm) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int k = 0; k <= arm; ++k) {
    const int qi = i + k * di, qj = j + k * dj;
    if (qi < 0 || qj < 0 || qi >= m.grid.nx || qj >= m.grid.ny)
      break;
    const double x = k * m.grid.pitch;
    const double y = m.at(qi, qj);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2)
    return std::nullopt;
  const double dn = n;
  return (sxy - sx * sy / dn) / (sxx - sx * sx / dn);
}

} // namespace

TrapReport characterize_trap(const PolarizedFieldMap &map, const TrapOptions &opts) {
  map.grid.validate();
  if (map.values.size() != map.grid.size())
    throw DomainError("map values do not match its grid");
  if (opts.arm < 1)
    throw DomainError("gradient arm must be >= 1 pixel");
  const PixelRegion r = opts.region.value_or(PixelRegion{0, 0, map.grid.nx, map.grid.ny});
  if (r.i0 < 0 || r.j0 < 0 || r.i1 > map.grid.nx || r.j1 > map.grid.ny || r.i0 >= r.i1 ||
      r.j0 >= r.j1)
    throw DomainError("trap search region lies outside the grid");

  int best_i = -1, best_j = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int j = std::max(r.j0, 1); j < std::min(r.j1, map.grid.ny - 1); ++j)
    for (int i = std::max(r.i0, 1); i < std::min(r.i1, map.grid.nx - 1); ++i) {
      const double c = map.at(i, j);
      bool minimum = true, strict = false;
      for (int dj = -1; dj <= 1 && minimum; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0)
            continue;
          const double v = map.at(i + di, j + dj);
          if (v < c) {
            minimum = false;
            break;
          }
          strict = strict || v > c;
        }
      if (minimum && strict && c < best) {
        best = c;
        best_i = i;
        best_j = j;
      }
    }
  if (best_i < 0)
    throw NotFound("no interior local minimum in the search region");

  TrapReport rep;
  rep.i = best_i;
  rep.j = best_j;
  rep.position = map.grid.pixel_center(best_i, best_j);
  rep.field = best;
  rep.grad_u_minus = slope(map, best_i, best_j, -1, 0, opts.arm);
  rep.grad_u_plus = slope(map, best_i, best_j, 1, 0, opts.arm);
  rep.grad_v_minus = slope(map, best_i, best_j, 0, -1, opts.arm);
  rep.grad_v_plus = slope(map, best_i, best_j, 0, 1, opts.arm);
  return rep;
}

} // namespace nvscope::analysis
