#pragma once

#include <span>
#include <string>

namespace nvscope::io {

struct PgmScaling {
  double offset = 0.0;  // value mapped to 0
  double scale = 1.0;   // grey level per unit value
  int maxval = 65535;
};

/// Binary P5, 16-bit big-endian samples, linearly mapping [min, max] of the finite values onto
/// [0, 65535]. Row j of the image is grid row ny - 1 - j so +v points up.
std::string encode_pgm16(std::span<const double> values, int nx, int ny, PgmScaling *scaling = nullptr);

} // namespace nvscope::io
