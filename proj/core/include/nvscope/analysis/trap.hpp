#pragma once

#include <optional>

#include "nvscope/nearfield.hpp"

namespace nvscope::analysis {

/// Inclusive-exclusive pixel bounds [i0, i1) x [j0, j1).
struct PixelRegion {
  int i0 = 0, j0 = 0, i1 = 0, j1 = 0;
};

struct TrapReport {
  int i = 0;
  int j = 0;
  Vec3 position;         // pixel centre, m
  double field = 0.0;    // T
  // One-sided slopes of |B| moving away from the minimum (T/m); empty if fewer than two samples.
  std::optional<double> grad_u_minus, grad_u_plus, grad_v_minus, grad_v_plus;
};

struct TrapOptions {
  std::optional<PixelRegion> region;  // whole grid by default
  int arm = 5;                        // pixels beyond the minimum in each fit
};

/// Deepest pixel that is <= all 8 neighbours (and below at least one). Throws NotFound.
TrapReport characterize_trap(const PolarizedFieldMap &map, const TrapOptions &opts = {});

} // namespace nvscope::analysis
