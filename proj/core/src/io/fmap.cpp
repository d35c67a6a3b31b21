#include "nvscope/io/fmap.hpp"

#include "binary_detail.hpp"
#include "nvscope/io/json_reader.hpp"

namespace nvscope::io {
namespace {

constexpr std::string_view kMagic = "FMAP1\n";

std::string assemble(const nlohmann::json &header, const std::vector<float> &values) {
  std::string out(kMagic);
  out += header.dump();
  out += '\n';
  out.reserve(out.size() + 4 * values.size());
  for (float v : values)
    detail::append_f32(out, v);
  return out;
}

nlohmann::json base_header(const GridSpec &grid, const std::vector<std::string> &names,
                           std::string_view component) {
  return {{"grid", grid_to_json(grid)},
          {"component", component},
          {"units", "T"},
          {"k", names.size()},
          {"channels", names}};
}

const std::vector<std::string> kPhasorChannels{"bx_re", "bx_im", "by_re", "by_im", "bz_re", "bz_im"};

} // namespace

nlohmann::json grid_to_json(const GridSpec &g) {
  return {{"origin_m", vec3_json(g.origin)},
          {"axis_u", vec3_json(g.axis_u)},
          {"axis_v", vec3_json(g.axis_v)},
          {"nx", g.nx},
          {"ny", g.ny},
          {"pitch_m", g.pitch}};
}

GridSpec grid_from_json(const nlohmann::json &j, const std::string &path) {
  ObjectReader r(j, path);
  GridSpec g;
  g.origin = r.vector_quantity("origin", Dimension::Length, Vec3{});
  g.axis_u = r.direction("axis_u").value_or(Vec3{1, 0, 0});
  g.axis_v = r.direction("axis_v").value_or(Vec3{0, 1, 0});
  const auto nx = r.integer("nx");
  const auto ny = r.integer("ny");
  if (!nx || !ny)
    throw ConfigError(path, "nx and ny are required");
  if (*nx < 1 || *ny < 1 || *nx > 1 << 20 || *ny > 1 << 20)
    throw ConfigError(path, "nx and ny must lie in [1, 2^20]");
  g.nx = static_cast<int>(*nx);
  g.ny = static_cast<int>(*ny);
  g.pitch = r.required_quantity("pitch", Dimension::Length);
  r.finish();
  try {
    g.validate();
  } catch (const DomainError &e) {
    throw ConfigError(path, e.what());
  }
  return g;
}

std::string encode_fmap(const PolarizedFieldMap &map) {
  std::vector<float> v(map.values.begin(), map.values.end());
  return assemble(base_header(map.grid, {"b"}, to_string(map.component)), v);
}

std::string encode_fmap(const FieldPhasorMap &map) {
  std::vector<float> v;
  v.reserve(map.values.size() * 6);
  for (const auto &b : map.values)
    for (const Complex &c : {b.x, b.y, b.z}) {
      v.push_back(static_cast<float>(c.real()));
      v.push_back(static_cast<float>(c.imag()));
    }
  return assemble(base_header(map.grid, kPhasorChannels, "phasor"), v);
}

std::string encode_fmap(const GridSpec &grid, const std::vector<std::string> &names,
                        const std::vector<float> &interleaved, const nlohmann::json &extra) {
  if (names.empty() || interleaved.size() != grid.size() * names.size())
    throw DomainError("channel data does not match grid and channel count");
  auto h = base_header(grid, names, "channels");
  if (extra.is_object())
    for (const auto &[k, val] : extra.items())
      h[k] = val;
  return assemble(h, interleaved);
}

FmapFile decode_fmap(std::string_view bytes) {
  const auto rec = detail::read_header(bytes, 0, kMagic);
  FmapFile f;
  f.header = rec.header;
  const std::size_t hdr = kMagic.size();
  try {
    if (!f.header.contains("grid"))
      throw FormatError("header lacks grid", hdr);
    f.grid = grid_from_json(f.header.at("grid"));
    const auto &k = f.header.value("k", nlohmann::json());
    if (!k.is_number_integer() || k.get<long long>() < 1 || k.get<long long>() > 64)
      throw FormatError("header channel count k must be an integer in [1, 64]", hdr);
    f.channels = k.get<int>();
  } catch (const ConfigError &e) {
    throw FormatError(std::string("invalid grid in header: ") + e.what(), hdr);
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("invalid header: ") + e.what(), hdr);
  }
  f.values = detail::read_payload(bytes, rec.data_offset,
                                  f.grid.size() * static_cast<std::size_t>(f.channels), false);
  return f;
}

PolarizedFieldMap decode_polarized_map(std::string_view bytes) {
  FmapFile f = decode_fmap(bytes);
  if (f.channels != 1)
    throw FormatError("expected a single-channel polarized map", kMagic.size());
  PolarizedFieldMap m;
  m.grid = f.grid;
  try {
    m.component = parse_component(f.header.value("component", ""));
  } catch (const DomainError &e) {
    throw FormatError(e.what(), kMagic.size());
  }
  m.values.assign(f.values.begin(), f.values.end());
  return m;
}

FieldPhasorMap decode_phasor_map(std::string_view bytes) {
  FmapFile f = decode_fmap(bytes);
  if (f.channels != 6 || f.header.value("component", "") != "phasor")
    throw FormatError("expected a six-channel phasor map", kMagic.size());
  FieldPhasorMap m;
  m.grid = f.grid;
  m.values.resize(f.grid.size());
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    const float *p = f.values.data() + 6 * k;
    m.values[k] = {Complex(p[0], p[1]), Complex(p[2], p[3]), Complex(p[4], p[5])};
  }
  return m;
}

} // namespace nvscope::io
