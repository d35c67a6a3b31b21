#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nvscope/acquisition.hpp"

namespace nvscope::io {

/// RCUB1 layout: "RCUB1\n", one line of compact JSON (grid, dt_list_ns, pulse, seed, frames),
/// "\n", then frames as little-endian float32, frame-major then row-major.
std::string encode_rcub(const ImageCube &cube);
ImageCube decode_rcub(std::string_view bytes);

/// Stream container: one single-frame RCUB record per frame, each header carrying
/// timestamp_ms and mw_on.
std::string encode_stream(const GridSpec &grid, double dt_ns, const PulseParams &pulse,
                          std::optional<std::uint64_t> seed, const std::vector<StreamFrame> &frames);

struct StreamFile {
  GridSpec grid;
  double dt_ns = 0.0;
  std::vector<StreamFrame> frames;
};
StreamFile decode_stream(std::string_view bytes);

} // namespace nvscope::io
