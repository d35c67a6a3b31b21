#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nvscope/nearfield.hpp"

namespace nvscope::io {

/// Grid in SI units: {"origin_m", "axis_u", "axis_v", "nx", "ny", "pitch_m"}.
nlohmann::json grid_to_json(const GridSpec &grid);
/// Accepts any length suffix for origin and pitch.
GridSpec grid_from_json(const nlohmann::json &j, const std::string &path = "grid");

/// FMAP1 layout: "FMAP1\n", one line of compact JSON, "\n", then nx*ny*k little-endian float32
/// values, row-major with the k channels of a pixel adjacent.
struct FmapFile {
  nlohmann::json header;
  GridSpec grid;
  int channels = 1;
  std::vector<float> values;
};

std::string encode_fmap(const PolarizedFieldMap &map);
std::string encode_fmap(const FieldPhasorMap &map);
/// Generic multi-channel map; `names` lands in the header as "channels".
std::string encode_fmap(const GridSpec &grid, const std::vector<std::string> &names,
                        const std::vector<float> &interleaved, const nlohmann::json &extra = {});

/// Throws FormatError naming the byte offset of the first problem.
FmapFile decode_fmap(std::string_view bytes);
PolarizedFieldMap decode_polarized_map(std::string_view bytes);
FieldPhasorMap decode_phasor_map(std::string_view bytes);

} // namespace nvscope::io
