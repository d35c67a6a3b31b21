#include "nvscope/io/device_json.hpp"

#include "nvscope/errors.hpp"
#include "nvscope/io/json_reader.hpp"

namespace nvscope::io {
namespace {

using nlohmann::json;
using D = Dimension;

int filaments(ObjectReader &r, int fallback) {
  const auto n = r.integer("n_filaments", fallback);
  if (n < 1 || n > 100000)
    throw ConfigError(r.path() + ".n_filaments", "must be between 1 and 100000");
  return static_cast<int>(n);
}

CurrentProfile profile(ObjectReader &r, CurrentProfile fallback) {
  const auto tag = r.string("profile");
  if (!tag)
    return fallback;
  try {
    return parse_profile(*tag);
  } catch (const DomainError &e) {
    throw ConfigError(r.path() + ".profile", e.what());
  }
}

CpwSpec read_cpw(ObjectReader &r) {
  CpwSpec s;
  s.signal_width = r.quantity("signal_width", D::Length, s.signal_width);
  s.gap = r.quantity("gap", D::Length, s.gap);
  s.ground_width = r.quantity("ground_width", D::Length, s.ground_width);
  s.length = r.quantity("length", D::Length, s.length);
  s.current = r.complex_quantity("current", D::Current, s.current);
  if (const auto *split = r.raw("ground_split")) {
    if (!split->is_array() || split->size() != 2 || !(*split)[0].is_number() ||
        !(*split)[1].is_number())
      throw ConfigError(r.path() + ".ground_split", "expected [left_fraction, right_fraction]");
    s.left_fraction = (*split)[0].get<double>();
    s.right_fraction = (*split)[1].get<double>();
  }
  s.profile = profile(r, s.profile);
  s.n_filaments = filaments(r, s.n_filaments);
  s.center = r.vector_quantity("center", D::Length, s.center);
  return s;
}

OmegaLoopParams read_omega(ObjectReader &r) {
  OmegaLoopParams p;
  p.radius = r.quantity("radius", D::Length, p.radius);
  p.width = r.quantity("width", D::Length, p.width);
  p.gap = r.quantity("gap", D::Length, p.gap);
  p.lead_length = r.quantity("lead_length", D::Length, p.lead_length);
  p.current = r.complex_quantity("current", D::Current, p.current);
  p.center = r.vector_quantity("center", D::Length, p.center);
  p.profile = profile(r, p.profile);
  p.n_filaments = filaments(r, p.n_filaments);
  return p;
}

MeanderParams read_meander(ObjectReader &r) {
  MeanderParams p;
  p.turns = static_cast<int>(r.integer("turns", p.turns));
  p.pitch = r.quantity("pitch", D::Length, p.pitch);
  p.leg = r.quantity("leg", D::Length, p.leg);
  p.width = r.quantity("width", D::Length, p.width);
  p.current = r.complex_quantity("current", D::Current, p.current);
  p.origin = r.vector_quantity("origin", D::Length, p.origin);
  p.profile = profile(r, p.profile);
  p.n_filaments = filaments(r, p.n_filaments);
  return p;
}

InterdigitalParams read_interdigital(ObjectReader &r) {
  InterdigitalParams p;
  p.fingers_per_side = static_cast<int>(r.integer("fingers_per_side", p.fingers_per_side));
  p.finger_length = r.quantity("finger_length", D::Length, p.finger_length);
  p.finger_width = r.quantity("finger_width", D::Length, p.finger_width);
  p.finger_spacing = r.quantity("finger_spacing", D::Length, p.finger_spacing);
  p.tip_gap = r.quantity("tip_gap", D::Length, p.tip_gap);
  p.feed_length = r.quantity("feed_length", D::Length, p.feed_length);
  p.feed_width = r.quantity("feed_width", D::Length, p.feed_width);
  p.finger_segments = static_cast<int>(r.integer("finger_segments", p.finger_segments));
  p.current = r.complex_quantity("current", D::Current, p.current);
  p.origin = r.vector_quantity("origin", D::Length, p.origin);
  p.profile = profile(r, p.profile);
  p.n_filaments = filaments(r, p.n_filaments);
  return p;
}

TwoRingTrapParams read_trap(ObjectReader &r) {
  TwoRingTrapParams p;
  p.inner_radius = r.quantity("inner_radius", D::Length, p.inner_radius);
  p.outer_radius = r.quantity("outer_radius", D::Length, p.outer_radius);
  p.width = r.quantity("width", D::Length, p.width);
  p.current = r.complex_quantity("current", D::Current, p.current);
  p.center = r.vector_quantity("center", D::Length, p.center);
  p.profile = profile(r, p.profile);
  p.n_filaments = filaments(r, p.n_filaments);
  return p;
}

template <class T>
T validated(T params, const std::string &path) {
  try {
    params.validate();
  } catch (const ConfigError &) {
    throw;
  } catch (const DomainError &e) {
    throw ConfigError(path, e.what());
  }
  return params;
}

} // namespace

DeviceParams parse_device(const json &doc, const std::string &path) {
  ObjectReader top(doc, path);
  const auto kind = top.string("kind");
  if (!kind)
    throw ConfigError(path + ".kind", "device kind is missing");
  static const json empty = json::object();
  const json *params_json = top.raw("params");
  ObjectReader r(params_json ? *params_json : empty, path + ".params");
  top.finish();

  DeviceParams out;
  if (*kind == "cpw")
    out = validated(read_cpw(r), r.path());
  else if (*kind == "omega-loop")
    out = validated(read_omega(r), r.path());
  else if (*kind == "meander")
    out = validated(read_meander(r), r.path());
  else if (*kind == "interdigital")
    out = validated(read_interdigital(r), r.path());
  else if (*kind == "two-ring-trap")
    out = validated(read_trap(r), r.path());
  else
    throw DomainError("unknown device kind '" + *kind +
                      "' (expected cpw, omega-loop, meander, interdigital or two-ring-trap)");
  r.finish();
  return out;
}

json device_to_json(const DeviceParams &params) {
  struct Visitor {
    json operator()(const CpwSpec &s) const {
      return {{"signal_width_m", s.signal_width},
              {"gap_m", s.gap},
              {"ground_width_m", s.ground_width},
              {"length_m", s.length},
              {"current_a", complex_json(s.current)},
              {"ground_split", {s.left_fraction, s.right_fraction}},
              {"profile", std::string(to_string(s.profile))},
              {"n_filaments", s.n_filaments},
              {"center_m", vec3_json(s.center)}};
    }
    json operator()(const OmegaLoopParams &p) const {
      return {{"radius_m", p.radius},          {"width_m", p.width},
              {"gap_m", p.gap},                {"lead_length_m", p.lead_length},
              {"current_a", complex_json(p.current)}, {"center_m", vec3_json(p.center)},
              {"profile", std::string(to_string(p.profile))}, {"n_filaments", p.n_filaments}};
    }
    json operator()(const MeanderParams &p) const {
      return {{"turns", p.turns},         {"pitch_m", p.pitch},
              {"leg_m", p.leg},           {"width_m", p.width},
              {"current_a", complex_json(p.current)}, {"origin_m", vec3_json(p.origin)},
              {"profile", std::string(to_string(p.profile))}, {"n_filaments", p.n_filaments}};
    }
    json operator()(const InterdigitalParams &p) const {
      return {{"fingers_per_side", p.fingers_per_side},
              {"finger_length_m", p.finger_length},
              {"finger_width_m", p.finger_width},
              {"finger_spacing_m", p.finger_spacing},
              {"tip_gap_m", p.tip_gap},
              {"feed_length_m", p.feed_length},
              {"feed_width_m", p.feed_width},
              {"finger_segments", p.finger_segments},
              {"current_a", complex_json(p.current)},
              {"origin_m", vec3_json(p.origin)},
              {"profile", std::string(to_string(p.profile))},
              {"n_filaments", p.n_filaments}};
    }
    json operator()(const TwoRingTrapParams &p) const {
      return {{"inner_radius_m", p.inner_radius},
              {"outer_radius_m", p.outer_radius},
              {"width_m", p.width},
              {"current_a", complex_json(p.current)},
              {"center_m", vec3_json(p.center)},
              {"profile", std::string(to_string(p.profile))},
              {"n_filaments", p.n_filaments}};
    }
  };
  return {{"kind", std::string(device_kind(params))}, {"params", std::visit(Visitor{}, params)}};
}

} // namespace nvscope::io
