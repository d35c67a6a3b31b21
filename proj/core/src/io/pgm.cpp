#include "nvscope/io/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nvscope/errors.hpp"

namespace nvscope::io {

std::string encode_pgm16(std::span<const double> values, int nx, int ny, PgmScaling *scaling) {
  if (nx < 1 || ny < 1 || values.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
    throw DomainError("image size does not match its dimensions");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  PgmScaling s;
  if (std::isfinite(lo)) {
    s.offset = lo;
    s.scale = hi > lo ? s.maxval / (hi - lo) : 0.0;
  }
  std::string out = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n" +
                    std::to_string(s.maxval) + "\n";
  out.reserve(out.size() + values.size() * 2);
  for (int row = ny - 1; row >= 0; --row)
    for (int i = 0; i < nx; ++i) {
      const double v = values[static_cast<std::size_t>(row) * static_cast<std::size_t>(nx) +
                              static_cast<std::size_t>(i)];
      const double g = std::isfinite(v) ? std::round((v - s.offset) * s.scale) : 0.0;
      const auto q = static_cast<unsigned>(std::clamp(g, 0.0, static_cast<double>(s.maxval)));
      out += static_cast<char>((q >> 8) & 0xFFu);
      out += static_cast<char>(q & 0xFFu);
    }
  if (scaling)
    *scaling = s;
  return out;
}

} // namespace nvscope::io
