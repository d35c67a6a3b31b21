#pragma once

#include <vector>

#include "nvscope/nearfield.hpp"

namespace nvscope::analysis {

/// A map placed at an integer pixel offset (along axis_u, axis_v) in the composite frame.
struct StitchTile {
  PolarizedFieldMap map;
  int offset_i = 0;
  int offset_j = 0;
};

struct StitchOptions {
  bool refine = false;
  int search_radius = 8;    // pixels, each direction
  int min_overlap = 16;     // pixels shared with already placed tiles for a shift to count
};

struct StitchResult {
  PolarizedFieldMap map;                       // bounding grid of all tiles; 0 where uncovered
  std::vector<int> coverage;                   // tiles contributing to each pixel
  std::vector<std::pair<int, int>> offsets;    // final offsets, same order as the input
};

/// Overlapping pixels are averaged in tile order. With refine, each tile after the first is
/// shifted by the integer displacement maximising the normalised cross-correlation with the
/// tiles already placed (ties go to the smallest shift).
StitchResult stitch(const std::vector<StitchTile> &tiles, const StitchOptions &opts = {});

} // namespace nvscope::analysis
