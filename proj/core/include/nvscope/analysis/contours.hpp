#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nvscope/fieldcore.hpp"

namespace nvscope::analysis {

/// Pixel coordinates (i, j) of a ridge sample.
struct PixelPoint {
  double i = 0.0;
  double j = 0.0;
};

struct IsoBRidge {
  int m = 1;                       // contour order; Omega dt = m pi
  double b_label = 0.0;            // m / (2 gamma dt), T
  std::vector<PixelPoint> points;  // chained through 8-neighbours
};

/// Ridges of |contrast| are maxima of sin^2(Omega dt / 2), so only odd orders are seen.
struct IsoBContourSet {
  double dt_mw_ns = 0.0;
  int order_step = 2;
  std::vector<IsoBRidge> ridges;  // sorted by m

  /// Distinct labels in increasing order.
  std::vector<std::pair<int, double>> levels() const;
};

struct ContourOptions {
  double threshold_fraction = 0.5;  // ridge pixels need |c| >= fraction * max |c|
  double gamma_hz_per_t = kGammaNv;
  /// Low-field reference pixel (i, j) to count from. Defaults to the image border.
  std::optional<std::pair<int, int>> anchor;
};

/// b_m = m / (2 gamma dt).
double contour_label(int m, double dt_mw_ns, double gamma_hz_per_t = kGammaNv);

/// Ridge detection on a single iso-B frame stored row-major (nx * ny). Ridges are numbered by the
/// fewest ridge crossings needed to reach them from the anchor region.
IsoBContourSet extract_contours(std::span<const double> image, int nx, int ny, double dt_mw_ns,
                                const ContourOptions &opts = {});

} // namespace nvscope::analysis
