#include "nvscope/io/rcub.hpp"

#include "binary_detail.hpp"
#include "nvscope/io/fmap.hpp"

namespace nvscope::io {
namespace {

constexpr std::string_view kMagic = "RCUB1\n";

nlohmann::json pulse_json(const PulseParams &p) {
  return {{"laser_ns", p.laser_ns}, {"wait_ns", p.wait_ns},       {"n_shots", p.n_shots},
          {"c0", p.c0},             {"counts_ref", p.counts_ref}, {"read_noise", p.read_noise}};
}

PulseParams pulse_from(const nlohmann::json &j) {
  PulseParams p;
  p.laser_ns = j.at("laser_ns").get<double>();
  p.wait_ns = j.at("wait_ns").get<double>();
  p.n_shots = j.at("n_shots").get<int>();
  p.c0 = j.at("c0").get<double>();
  p.counts_ref = j.at("counts_ref").get<double>();
  p.read_noise = j.value("read_noise", 0.0);
  p.validate();
  return p;
}

nlohmann::json seed_json(std::optional<std::uint64_t> seed) {
  return seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
}

std::optional<std::uint64_t> seed_from(const nlohmann::json &j) {
  if (j.is_null())
    return std::nullopt;
  return j.get<std::uint64_t>();
}

void append_frame(std::string &out, const std::vector<double> &frame) {
  for (double v : frame)
    detail::append_f32(out, static_cast<float>(v));
}

std::vector<double> to_double(const std::vector<float> &v, std::size_t from, std::size_t n) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from),
          v.begin() + static_cast<std::ptrdiff_t>(from + n)};
}

// Decodes one record at `pos`; returns the offset just past it.
template <class F>
std::size_t read_record(std::string_view bytes, std::size_t pos, bool allow_trailing, F &&use) {
  const auto rec = detail::read_header(bytes, pos, kMagic);
  const std::size_t hdr = pos + kMagic.size();
  GridSpec grid;
  std::vector<double> dt;
  PulseParams pulse;
  std::optional<std::uint64_t> seed;
  try {
    if (!rec.header.contains("grid"))
      throw FormatError("header lacks grid", hdr);
    grid = grid_from_json(rec.header.at("grid"));
    dt = rec.header.at("dt_list_ns").get<std::vector<double>>();
    pulse = pulse_from(rec.header.at("pulse"));
    seed = seed_from(rec.header.value("seed", nlohmann::json()));
    if (rec.header.at("frames").get<std::size_t>() != dt.size())
      throw FormatError("frame count does not match dt list", hdr);
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("invalid header: ") + e.what(), hdr);
  } catch (const DomainError &e) {
    throw FormatError(std::string("invalid header: ") + e.what(), hdr);
  }
  const std::size_t n = grid.size() * dt.size();
  const auto values = detail::read_payload(bytes, rec.data_offset, n, allow_trailing);
  use(rec.header, grid, dt, pulse, seed, values);
  return rec.data_offset + 4 * n;
}

} // namespace

std::string encode_rcub(const ImageCube &cube) {
  cube.validate();
  const nlohmann::json h{{"grid", grid_to_json(cube.grid)},
                         {"dt_list_ns", cube.dt_ns},
                         {"pulse", pulse_json(cube.pulse)},
                         {"seed", seed_json(cube.seed)},
                         {"frames", cube.frames.size()}};
  std::string out(kMagic);
  out += h.dump();
  out += '\n';
  for (const auto &f : cube.frames)
    append_frame(out, f);
  return out;
}

ImageCube decode_rcub(std::string_view bytes) {
  ImageCube cube;
  read_record(bytes, 0, false,
              [&](const nlohmann::json &, const GridSpec &grid, const std::vector<double> &dt,
                  const PulseParams &pulse, std::optional<std::uint64_t> seed,
                  const std::vector<float> &values) {
                cube.grid = grid;
                cube.dt_ns = dt;
                cube.pulse = pulse;
                cube.seed = seed;
                for (std::size_t k = 0; k < dt.size(); ++k)
                  cube.frames.push_back(to_double(values, k * grid.size(), grid.size()));
              });
  try {
    cube.validate();
  } catch (const DomainError &e) {
    throw FormatError(std::string("invalid cube: ") + e.what(), kMagic.size());
  }
  return cube;
}

std::string encode_stream(const GridSpec &grid, double dt_ns, const PulseParams &pulse,
                          std::optional<std::uint64_t> seed, const std::vector<StreamFrame> &frames) {
  std::string out;
  for (const auto &f : frames) {
    if (f.contrast.size() != grid.size())
      throw DomainError("stream frame does not match the grid");
    const nlohmann::json h{{"grid", grid_to_json(grid)},
                           {"dt_list_ns", {dt_ns}},
                           {"pulse", pulse_json(pulse)},
                           {"seed", seed_json(seed)},
                           {"frames", 1},
                           {"timestamp_ms", f.timestamp_ms},
                           {"mw_on", f.mw_on}};
    out += kMagic;
    out += h.dump();
    out += '\n';
    append_frame(out, f.contrast);
  }
  return out;
}

StreamFile decode_stream(std::string_view bytes) {
  StreamFile s;
  std::size_t pos = 0;
  bool first = true;
  while (pos < bytes.size()) {
    const std::size_t at = pos;
    pos = read_record(bytes, pos, true,
                      [&](const nlohmann::json &h, const GridSpec &grid, const std::vector<double> &dt,
                          const PulseParams &, std::optional<std::uint64_t>,
                          const std::vector<float> &values) {
                        if (dt.size() != 1)
                          throw FormatError("stream records hold exactly one frame", at);
                        if (first) {
                          s.grid = grid;
                          s.dt_ns = dt[0];
                          first = false;
                        } else if (!(grid == s.grid)) {
                          throw FormatError("stream record grid differs from the first", at);
                        }
                        StreamFrame f;
                        try {
                          f.timestamp_ms = h.at("timestamp_ms").get<double>();
                          f.mw_on = h.at("mw_on").get<bool>();
                        } catch (const nlohmann::json::exception &e) {
                          throw FormatError(std::string("invalid stream header: ") + e.what(), at);
                        }
                        f.contrast.assign(values.begin(), values.end());
                        s.frames.push_back(std::move(f));
                      });
  }
  return s;
}

} // namespace nvscope::io
