#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nvscope/errors.hpp"

namespace nvscope::io::detail {

inline void append_f32(std::string &out, float v) {
  auto u = std::bit_cast<std::uint32_t>(v);
  char b[4];
  for (int k = 0; k < 4; ++k)
    b[k] = static_cast<char>((u >> (8 * k)) & 0xFFu);
  out.append(b, 4);
}

inline float read_f32(const char *p) {
  std::uint32_t u = 0;
  for (int k = 0; k < 4; ++k)
    u |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[k])) << (8 * k);
  return std::bit_cast<float>(u);
}

struct Record {
  nlohmann::json header;
  std::size_t data_offset = 0;  // absolute offset of the payload
};

/// Parses magic + header line starting at `pos`.
inline Record read_header(std::string_view bytes, std::size_t pos, std::string_view magic) {
  if (bytes.size() < pos + magic.size() || bytes.substr(pos, magic.size()) != magic)
    throw FormatError("missing " + std::string(magic.substr(0, magic.size() - 1)) + " magic", pos);
  const std::size_t start = pos + magic.size();
  const std::size_t end = bytes.find('\n', start);
  if (end == std::string_view::npos)
    throw FormatError("unterminated header line", bytes.size());
  Record r;
  try {
    r.header = nlohmann::json::parse(bytes.substr(start, end - start));
  } catch (const nlohmann::json::parse_error &e) {
    throw FormatError(std::string("invalid header JSON: ") + e.what(),
                      start + (e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!r.header.is_object())
    throw FormatError("header is not a JSON object", start);
  r.data_offset = end + 1;
  return r;
}

inline std::vector<float> read_payload(std::string_view bytes, std::size_t offset, std::size_t count,
                                       bool allow_trailing) {
  const std::size_t need = count * 4;
  if (bytes.size() - offset < need)
    throw FormatError("truncated payload: expected " + std::to_string(need) + " bytes, found " +
                          std::to_string(bytes.size() - offset),
                      bytes.size());
  if (!allow_trailing && bytes.size() - offset > need)
    throw FormatError("unexpected trailing bytes", offset + need);
  std::vector<float> v(count);
  for (std::size_t k = 0; k < count; ++k)
    v[k] = read_f32(bytes.data() + offset + 4 * k);
  return v;
}

} // namespace nvscope::io::detail
