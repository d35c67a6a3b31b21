#include "nvscope/analysis/contours.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "nvscope/errors.hpp"

namespace nvscope::analysis {
namespace {

constexpr int kUnset = std::numeric_limits<int>::max();

// Orders a component's pixels into a chain by walking to the nearest unvisited pixel.
std::vector<PixelPoint> chain(std::vector<std::pair<int, int>> px) {
  std::vector<PixelPoint> out;
  if (px.empty())
    return out;
  auto neighbours = [&](const std::pair<int, int> &a) {
    int n = 0;
    for (const auto &b : px)
      if (std::max(std::abs(a.first - b.first), std::abs(a.second - b.second)) == 1)
        ++n;
    return n;
  };
  // Start at an end of an open chain when there is one.
  std::size_t start = 0;
  int fewest = std::numeric_limits<int>::max();
  for (std::size_t k = 0; k < px.size(); ++k) {
    const int n = neighbours(px[k]);
    if (n < fewest) {
      fewest = n;
      start = k;
    }
  }
  std::swap(px[0], px[start]);
  for (std::size_t k = 0; k < px.size(); ++k) {
    out.push_back({static_cast<double>(px[k].first), static_cast<double>(px[k].second)});
    std::size_t best = k + 1;
    long best_d = std::numeric_limits<long>::max();
    for (std::size_t q = k + 1; q < px.size(); ++q) {
      const long di = px[q].first - px[k].first;
      const long dj = px[q].second - px[k].second;
      const long d = di * di + dj * dj;
      if (d < best_d) {
        best_d = d;
        best = q;
      }
    }
    if (best < px.size())
      std::swap(px[k + 1], px[best]);
  }
  return out;
}

} // namespace

std::vector<std::pair<int, double>> IsoBContourSet::levels() const {
  std::vector<std::pair<int, double>> out;
  for (const auto &r : ridges)
    if (out.empty() || out.back().first != r.m)
      out.emplace_back(r.m, r.b_label);
  return out;
}

double contour_label(int m, double dt_mw_ns, double gamma_hz_per_t) {
  if (m < 1)
    throw DomainError("contour order must be >= 1");
  if (!(dt_mw_ns > 0.0))
    throw DomainError("pulse duration must be positive");
  return static_cast<double>(m) / (2.0 * gamma_hz_per_t * dt_mw_ns * 1e-9);
}

IsoBContourSet extract_contours(std::span<const double> image, int nx, int ny, double dt_mw_ns,
                                const ContourOptions &opts) {
  if (nx < 1 || ny < 1 || image.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
    throw DomainError("image size does not match its dimensions");
  if (!(dt_mw_ns > 0.0))
    throw DomainError("pulse duration must be positive");
  if (!(opts.threshold_fraction > 0.0 && opts.threshold_fraction <= 1.0))
    throw DomainError("ridge threshold fraction must lie in (0, 1]");
  if (opts.anchor && (opts.anchor->first < 0 || opts.anchor->first >= nx ||
                      opts.anchor->second < 0 || opts.anchor->second >= ny))
    throw DomainError("contour anchor lies outside the image");

  IsoBContourSet out;
  out.dt_mw_ns = dt_mw_ns;
  const auto idx = [nx](int i, int j) {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  };
  std::vector<double> a(image.size());
  double peak = 0.0;
  for (std::size_t k = 0; k < image.size(); ++k) {
    a[k] = std::isfinite(image[k]) ? std::abs(image[k]) : 0.0;
    peak = std::max(peak, a[k]);
  }
  if (!(peak > 0.0))
    return out;
  const double level = opts.threshold_fraction * peak;

  // Ridge pixels: above threshold and a 1-D maximum along at least two of the four grid
  // directions. A single direction also fires on the flanks of a curved crest, along the tangent.
  const auto line_max = [&](int i, int j, int di, int dj) {
    const int i0 = i - di, j0 = j - dj, i1 = i + di, j1 = j + dj;
    if (i0 < 0 || j0 < 0 || i0 >= nx || j0 >= ny || i1 < 0 || j1 < 0 || i1 >= nx || j1 >= ny)
      return false;
    const double c = a[idx(i, j)], v0 = a[idx(i0, j0)], v1 = a[idx(i1, j1)];
    return c >= v0 && c >= v1 && (c > v0 || c > v1);
  };
  std::vector<char> ridge(a.size(), 0);
  for (int j = 1; j + 1 < ny; ++j)
    for (int i = 1; i + 1 < nx; ++i) {
      if (a[idx(i, j)] < level)
        continue;
      const int dirs = line_max(i, j, 1, 0) + line_max(i, j, 0, 1) + line_max(i, j, 1, 1) +
                       line_max(i, j, 1, -1);
      if (dirs >= 2)
        ridge[idx(i, j)] = 1;
    }
  // Extend crests onto the image edge so they still close off regions there.
  const auto edge = [&](int i, int j, int di, int dj, int in_i, int in_j) {
    if (a[idx(i, j)] >= level && line_max(i, j, di, dj) && ridge[idx(in_i, in_j)])
      ridge[idx(i, j)] = 1;
  };
  if (nx >= 3 && ny >= 3) {
    for (int i = 1; i + 1 < nx; ++i) {
      edge(i, 0, 1, 0, i, 1);
      edge(i, ny - 1, 1, 0, i, ny - 2);
    }
    for (int j = 1; j + 1 < ny; ++j) {
      edge(0, j, 0, 1, 1, j);
      edge(nx - 1, j, 0, 1, nx - 2, j);
    }
  }

  // 8-connected components.
  std::vector<int> comp(a.size(), -1);
  int n_comp = 0;
  std::vector<std::vector<std::pair<int, int>>> members;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!ridge[idx(i, j)] || comp[idx(i, j)] >= 0)
        continue;
      members.emplace_back();
      std::vector<std::pair<int, int>> stack{{i, j}};
      comp[idx(i, j)] = n_comp;
      while (!stack.empty()) {
        const auto [ci, cj] = stack.back();
        stack.pop_back();
        members.back().emplace_back(ci, cj);
        for (int dj = -1; dj <= 1; ++dj)
          for (int di = -1; di <= 1; ++di) {
            const int qi = ci + di, qj = cj + dj;
            if (qi < 0 || qj < 0 || qi >= nx || qj >= ny)
              continue;
            const auto q = idx(qi, qj);
            if (ridge[q] && comp[q] < 0) {
              comp[q] = n_comp;
              stack.emplace_back(qi, qj);
            }
          }
      }
      ++n_comp;
    }
  if (n_comp == 0)
    return out;

  // 0-1 BFS over 4-neighbours; entering a different ridge costs one crossing.
  std::vector<int> dist(a.size(), kUnset);
  std::deque<std::pair<int, int>> dq;
  const auto seed = [&](int i, int j) {
    const auto k = idx(i, j);
    const int d = ridge[k] ? 1 : 0;
    if (d < dist[k]) {
      dist[k] = d;
      if (d == 0)
        dq.emplace_front(i, j);
      else
        dq.emplace_back(i, j);
    }
  };
  if (opts.anchor) {
    seed(opts.anchor->first, opts.anchor->second);
  } else {
    for (int i = 0; i < nx; ++i) {
      seed(i, 0);
      seed(i, ny - 1);
    }
    for (int j = 0; j < ny; ++j) {
      seed(0, j);
      seed(nx - 1, j);
    }
  }
  constexpr int kSteps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  while (!dq.empty()) {
    const auto [ci, cj] = dq.front();
    dq.pop_front();
    const auto k = idx(ci, cj);
    for (const auto &s : kSteps) {
      const int qi = ci + s[0], qj = cj + s[1];
      if (qi < 0 || qj < 0 || qi >= nx || qj >= ny)
        continue;
      const auto q = idx(qi, qj);
      const int w = (ridge[q] && comp[q] != comp[k]) ? 1 : 0;
      if (dist[k] + w < dist[q]) {
        dist[q] = dist[k] + w;
        if (w == 0)
          dq.emplace_front(qi, qj);
        else
          dq.emplace_back(qi, qj);
      }
    }
  }

  for (int c = 0; c < n_comp; ++c) {
    int n = kUnset;
    for (const auto &[i, j] : members[static_cast<std::size_t>(c)])
      n = std::min(n, dist[idx(i, j)]);
    if (n == kUnset || n < 1)
      continue;  // unreachable from the anchor
    IsoBRidge r;
    r.m = 2 * n - 1;
    r.b_label = contour_label(r.m, dt_mw_ns, opts.gamma_hz_per_t);
    r.points = chain(members[static_cast<std::size_t>(c)]);
    out.ridges.push_back(std::move(r));
  }
  std::stable_sort(out.ridges.begin(), out.ridges.end(),
                   [](const IsoBRidge &x, const IsoBRidge &y) { return x.m < y.m; });
  return out;
}

} // namespace nvscope::analysis
