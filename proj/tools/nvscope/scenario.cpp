#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nvscope/io/device_json.hpp"
#include "nvscope/io/fmap.hpp"
#include "nvscope/io/json_reader.hpp"

namespace nvscope::app {
namespace {

using io::Dimension;
using io::ObjectReader;
using json = nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Time in ns, exact when given with the _ns suffix.
double ns_quantity(ObjectReader &r, const std::string &base, double fallback) {
  const auto q = r.quantity(base, Dimension::Time);
  if (!q)
    return fallback;
  if (const json *v = r.raw(base + "_ns"))
    return v->get<double>();
  return *q * 1e9;
}

template <class F>
auto checked(const std::string &path, F &&f) {
  try {
    return f();
  } catch (const ConfigError &) {
    throw;
  } catch (const DomainError &e) {
    throw ConfigError(path, e.what());
  }
}

std::pair<int, int> pixel_pair(ObjectReader &r, const std::string &key) {
  const json *v = r.raw(key);
  if (!v || !v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() ||
      !(*v)[1].is_number_integer())
    throw ConfigError(r.path() + "." + key, "expected [i, j] pixel indices");
  return {(*v)[0].get<int>(), (*v)[1].get<int>()};
}

analysis::PixelRegion region_of(ObjectReader &r, const std::string &key) {
  const json *v = r.raw(key);
  if (!v || !v->is_array() || v->size() != 4)
    throw ConfigError(r.path() + "." + key, "expected [i0, j0, i1, j1]");
  for (const auto &e : *v)
    if (!e.is_number_integer())
      throw ConfigError(r.path() + "." + key, "expected integer pixel bounds");
  return {(*v)[0].get<int>(), (*v)[1].get<int>(), (*v)[2].get<int>(), (*v)[3].get<int>()};
}

SensingLayer read_layer(ObjectReader r) {
  SensingLayer l;
  l.height = r.quantity("height", Dimension::Length, l.height);
  l.thickness = r.quantity("thickness", Dimension::Length, l.thickness);
  l.n_samples = static_cast<int>(r.integer("n_samples", l.n_samples));
  r.finish();
  checked(r.path(), [&] { l.validate(); return 0; });
  return l;
}

PulseParams read_pulse(ObjectReader r) {
  PulseParams p;
  p.laser_ns = ns_quantity(r, "laser", p.laser_ns);
  p.wait_ns = ns_quantity(r, "wait", p.wait_ns);
  p.n_shots = static_cast<int>(r.integer("n_shots", p.n_shots));
  p.c0 = r.number("c0", p.c0);
  p.counts_ref = r.number("counts_ref", p.counts_ref);
  p.read_noise = r.number("read_noise", p.read_noise);
  r.finish();
  checked(r.path(), [&] { p.validate(); return 0; });
  return p;
}

DecayParams read_decay(const json &doc, const std::string &path) {
  if (doc.is_null())
    return DecayParams::none();
  ObjectReader r(doc, path);
  DecayParams d;
  d.tau_fast_ns = ns_quantity(r, "tau_fast", d.tau_fast_ns);
  d.tau_slow_ns = ns_quantity(r, "tau_slow", d.tau_slow_ns);
  d.weight_fast = r.number("weight_fast", d.weight_fast);
  r.finish();
  checked(path, [&] { d.validate(); return 0; });
  return d;
}

ScanSpec read_scan(ObjectReader r) {
  ScanSpec s;
  s.start_ns = ns_quantity(r, "start", s.start_ns);
  s.stop_ns = ns_quantity(r, "stop", s.stop_ns);
  s.steps = static_cast<int>(r.integer("steps", s.steps));
  r.finish();
  checked(r.path(), [&] { return linear_scan(s.start_ns, s.stop_ns, s.steps).size(); });
  if (s.steps < 8)
    throw ConfigError(r.path() + ".steps", "a fitted scan needs at least 8 steps");
  return s;
}

StreamSpec read_stream(ObjectReader r) {
  StreamSpec s;
  s.dt_ns = ns_quantity(r, "dt", s.dt_ns);
  if (const auto v = r.quantity("row_time", Dimension::Time))
    s.timing.row_time_us = r.raw("row_time_us") ? r.raw("row_time_us")->get<double>() : *v * 1e6;
  if (const auto v = r.quantity("overhead", Dimension::Time))
    s.timing.overhead_us = r.raw("overhead_us") ? r.raw("overhead_us")->get<double>() : *v * 1e6;
  checked(r.path(), [&] { s.timing.validate(); return 0; });
  const json *sched = r.raw("schedule");
  if (!sched || !sched->is_array() || sched->empty())
    throw ConfigError(r.path() + ".schedule", "expected a non-empty list of {on, duration}");
  for (std::size_t k = 0; k < sched->size(); ++k) {
    ObjectReader e((*sched)[k], r.path() + ".schedule[" + std::to_string(k) + "]");
    ScheduleEntry entry;
    const auto on = e.boolean("on");
    if (!on)
      throw ConfigError(e.path() + ".on", "required flag is missing");
    entry.on = *on;
    const double d = e.required_quantity("duration", Dimension::Time);
    entry.duration_ms = e.raw("duration_ms") ? e.raw("duration_ms")->get<double>() : d * 1e3;
    if (!(entry.duration_ms > 0.0))
      throw ConfigError(e.path() + ".duration", "must be positive");
    e.finish();
    s.schedule.push_back(entry);
  }
  r.finish();
  return s;
}

FitSpec read_fit(ObjectReader r) {
  FitSpec f;
  auto &c = f.config;
  c.max_iterations = static_cast<int>(r.integer("max_iterations", c.max_iterations));
  c.rel_tolerance = r.number("rel_tolerance", c.rel_tolerance);
  const auto lo = r.quantity("rabi_min", Dimension::Frequency);
  const auto hi = r.quantity("rabi_max", Dimension::Frequency);
  if (lo.has_value() != hi.has_value())
    throw ConfigError(r.path(), "rabi_min and rabi_max must be given together");
  if (lo)
    f.rabi_bounds_hz = std::make_pair(*lo, *hi);
  if (lo)
    c.omega_bounds = std::make_pair(kTwoPi * *lo * 1e-9, kTwoPi * *hi * 1e-9);
  c.min_contrast_snr = r.number("min_contrast_snr", c.min_contrast_snr);
  c.allow_phase = r.boolean("allow_phase", c.allow_phase);
  c.track_baseline = r.boolean("track_baseline", c.track_baseline);
  const std::string env = r.string("envelope", "double-exp");
  if (env == "double-exp")
    c.envelope_mode = analysis::EnvelopeMode::DoubleExp;
  else if (env == "single-exp")
    c.envelope_mode = analysis::EnvelopeMode::SingleExp;
  else
    throw ConfigError(r.path() + ".envelope", "expected double-exp or single-exp");
  f.min_converged_fraction = r.number("min_converged_fraction", f.min_converged_fraction);
  if (!(f.min_converged_fraction >= 0.0 && f.min_converged_fraction <= 1.0))
    throw ConfigError(r.path() + ".min_converged_fraction", "must lie in [0, 1]");
  r.finish();
  checked(r.path(), [&] { c.validate(); return 0; });
  return f;
}

ContourSpec read_contours(ObjectReader r) {
  ContourSpec c;
  c.dt_ns = ns_quantity(r, "dt", c.dt_ns);
  if (!(c.dt_ns > 0.0))
    throw ConfigError(r.path() + ".dt", "must be positive");
  c.threshold_fraction = r.number("threshold_fraction", c.threshold_fraction);
  if (!(c.threshold_fraction > 0.0 && c.threshold_fraction <= 1.0))
    throw ConfigError(r.path() + ".threshold_fraction", "must lie in (0, 1]");
  if (r.raw("anchor"))
    c.anchor = pixel_pair(r, "anchor");
  c.noisy = r.boolean("noisy", c.noisy);
  r.finish();
  return c;
}

ReportSpec read_report(ObjectReader r) {
  ReportSpec s;
  s.p_in_dbm = r.quantity("p_in", Dimension::Power);
  s.impedance_ohm = r.quantity("impedance", Dimension::Resistance, s.impedance_ohm);
  if (!(s.impedance_ohm > 0.0))
    throw ConfigError(r.path() + ".impedance", "must be positive");
  if (const auto row = r.integer("line_cut_row"))
    s.line_cut_row = static_cast<int>(*row);
  if (auto t = r.optional_child("trap")) {
    analysis::TrapOptions o;
    if (t->raw("region"))
      o.region = region_of(*t, "region");
    o.arm = static_cast<int>(t->integer("arm", o.arm));
    if (o.arm < 1)
      throw ConfigError(t->path() + ".arm", "must be >= 1");
    t->finish();
    s.trap = o;
  }
  if (auto d = r.optional_child("dynamic_range")) {
    const double lo = d->required_quantity("b_min", Dimension::Field);
    const double hi = d->required_quantity("b_max", Dimension::Field);
    d->finish();
    s.dynamic_range = std::make_pair(lo, hi);
  }
  if (auto d = r.optional_child("sensitivity")) {
    SensitivitySpec ss;
    ss.repeats = static_cast<int>(d->integer("repeats", ss.repeats));
    if (ss.repeats < 10)
      throw ConfigError(d->path() + ".repeats", "needs at least 10 repeats");
    if (d->raw("region"))
      ss.region = region_of(*d, "region");
    d->finish();
    s.sensitivity = ss;
  }
  r.finish();
  return s;
}

StitchSpec read_stitch(ObjectReader r) {
  StitchSpec s;
  const json *tiles = r.raw("tiles");
  if (!tiles || !tiles->is_array() || tiles->empty())
    throw ConfigError(r.path() + ".tiles", "expected a non-empty list of tiles");
  for (std::size_t k = 0; k < tiles->size(); ++k) {
    ObjectReader t((*tiles)[k], r.path() + ".tiles[" + std::to_string(k) + "]");
    StitchTileSpec tile;
    const auto p = t.string("path");
    if (!p)
      throw ConfigError(t.path() + ".path", "tile path is missing");
    tile.path = *p;
    std::tie(tile.offset_i, tile.offset_j) = t.raw("offset") ? pixel_pair(t, "offset") : std::pair{0, 0};
    t.finish();
    s.tiles.push_back(tile);
  }
  s.refine = r.boolean("refine", s.refine);
  s.search_radius = static_cast<int>(r.integer("search_radius", s.search_radius));
  if (s.search_radius < 0)
    throw ConfigError(r.path() + ".search_radius", "must be >= 0");
  r.finish();
  return s;
}

json ns_or_null(double ns) { return std::isfinite(ns) ? json(ns) : json(nullptr); }

} // namespace

ScenarioConfig parse_scenario(const json &doc) {
  ObjectReader r(doc, "");
  ScenarioConfig c;
  c.name = r.string("name", "scenario");
  const json *device = r.raw("device");
  if (!device)
    throw ConfigError("device", "required section is missing");
  c.device = io::parse_device(*device, "device");
  const json *grid = r.raw("grid");
  if (!grid)
    throw ConfigError("grid", "required section is missing");
  c.grid = io::grid_from_json(*grid, "grid");
  if (auto l = r.optional_child("layer"))
    c.layer = read_layer(*l);

  if (auto nv = r.optional_child("nv")) {
    c.tilt_deg = nv->quantity("tilt", Dimension::Angle, c.tilt_deg);
    c.tilt_plane = checked(nv->path() + ".tilt_plane",
                           [&] { return TiltPlane::parse(nv->string("tilt_plane", "XZ")); });
    nv->finish();
    checked(nv->path() + ".tilt", [&] { return nv_frame_from_tilt(c.tilt_deg, c.tilt_plane); });
  }

  if (auto b = r.optional_child("bias")) {
    c.mw_frequency_hz = b->quantity("mw_frequency", Dimension::Frequency, c.mw_frequency_hz);
    c.bias.d_zfs_hz = b->quantity("zfs", Dimension::Frequency, c.bias.d_zfs_hz);
    c.bias.gamma_hz_per_t = b->quantity("gamma", Dimension::Gyromagnetic, c.bias.gamma_hz_per_t);
    const long long sign = b->integer("sign", c.bias.sign);
    if (sign != 1 && sign != -1)
      throw ConfigError(b->path() + ".sign", "must be +1 or -1");
    c.bias.sign = static_cast<int>(sign);
    b->finish();
    checked(b->path(), [&] {
      c.bias.validate();
      return bias_field_for_frequency(c.mw_frequency_hz, c.transition(), c.bias);
    });
  }

  if (auto p = r.optional_child("pulse"))
    c.pulse = read_pulse(*p);
  if (const json *d = r.raw("decay"))
    c.decay = read_decay(*d, "decay");
  if (auto s = r.optional_child("scan"))
    c.scan = read_scan(*s);
  if (const json *s = r.raw("seed"); s && !s->is_null()) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
      throw ConfigError("seed", "expected a non-negative integer or null");
    c.seed = s->get<std::uint64_t>();
  }
  if (auto s = r.optional_child("stream"))
    c.stream = read_stream(*s);
  if (auto f = r.optional_child("fit"))
    c.fit = read_fit(*f);
  if (auto k = r.optional_child("contours"))
    c.contours = read_contours(*k);
  if (auto k = r.optional_child("report"))
    c.report = read_report(*k);
  if (auto k = r.optional_child("stitch"))
    c.stitch = read_stitch(*k);
  r.finish();
  return c;
}

ScenarioConfig load_scenario(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error &e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

json scenario_to_json(const ScenarioConfig &c) {
  json doc;
  doc["name"] = c.name;
  doc["device"] = io::device_to_json(c.device);
  doc["grid"] = io::grid_to_json(c.grid);
  doc["layer"] = {{"height_m", c.layer.height},
                  {"thickness_m", c.layer.thickness},
                  {"n_samples", c.layer.n_samples}};
  doc["nv"] = {{"tilt_deg", c.tilt_deg}, {"tilt_plane", c.tilt_plane.tag()}};
  doc["bias"] = {{"mw_frequency_hz", c.mw_frequency_hz},
                 {"zfs_hz", c.bias.d_zfs_hz},
                 {"gamma_hz_per_t", c.bias.gamma_hz_per_t},
                 {"sign", c.bias.sign}};
  doc["pulse"] = {{"laser_ns", c.pulse.laser_ns}, {"wait_ns", c.pulse.wait_ns},
                  {"n_shots", c.pulse.n_shots},   {"c0", c.pulse.c0},
                  {"counts_ref", c.pulse.counts_ref}, {"read_noise", c.pulse.read_noise}};
  if (std::isfinite(c.decay.tau_fast_ns) || std::isfinite(c.decay.tau_slow_ns))
    doc["decay"] = {{"tau_fast_ns", ns_or_null(c.decay.tau_fast_ns)},
                    {"tau_slow_ns", ns_or_null(c.decay.tau_slow_ns)},
                    {"weight_fast", c.decay.weight_fast}};
  else
    doc["decay"] = nullptr;
  if (c.scan)
    doc["scan"] = {{"start_ns", c.scan->start_ns}, {"stop_ns", c.scan->stop_ns}, {"steps", c.scan->steps}};
  doc["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  if (c.stream) {
    json sched = json::array();
    for (const auto &e : c.stream->schedule)
      sched.push_back({{"on", e.on}, {"duration_ms", e.duration_ms}});
    doc["stream"] = {{"dt_ns", c.stream->dt_ns},
                     {"row_time_us", c.stream->timing.row_time_us},
                     {"overhead_us", c.stream->timing.overhead_us},
                     {"schedule", sched}};
  }
  const auto &fc = c.fit.config;
  json fit = {{"max_iterations", fc.max_iterations},
              {"rel_tolerance", fc.rel_tolerance},
              {"min_contrast_snr", fc.min_contrast_snr},
              {"allow_phase", fc.allow_phase},
              {"track_baseline", fc.track_baseline},
              {"envelope", fc.envelope_mode == analysis::EnvelopeMode::DoubleExp ? "double-exp" : "single-exp"},
              {"min_converged_fraction", c.fit.min_converged_fraction}};
  if (c.fit.rabi_bounds_hz) {
    fit["rabi_min_hz"] = c.fit.rabi_bounds_hz->first;
    fit["rabi_max_hz"] = c.fit.rabi_bounds_hz->second;
  }
  doc["fit"] = fit;
  if (c.contours) {
    json k = {{"dt_ns", c.contours->dt_ns},
              {"threshold_fraction", c.contours->threshold_fraction},
              {"noisy", c.contours->noisy}};
    if (c.contours->anchor)
      k["anchor"] = {c.contours->anchor->first, c.contours->anchor->second};
    doc["contours"] = k;
  }
  json rep = {{"impedance_ohm", c.report.impedance_ohm}};
  if (c.report.p_in_dbm)
    rep["p_in_dbm"] = *c.report.p_in_dbm;
  if (c.report.line_cut_row)
    rep["line_cut_row"] = *c.report.line_cut_row;
  if (c.report.trap) {
    json t = {{"arm", c.report.trap->arm}};
    if (const auto &g = c.report.trap->region)
      t["region"] = {g->i0, g->j0, g->i1, g->j1};
    rep["trap"] = t;
  }
  if (c.report.dynamic_range)
    rep["dynamic_range"] = {{"b_min_t", c.report.dynamic_range->first},
                            {"b_max_t", c.report.dynamic_range->second}};
  if (c.report.sensitivity) {
    json s = {{"repeats", c.report.sensitivity->repeats}};
    if (const auto &g = c.report.sensitivity->region)
      s["region"] = {g->i0, g->j0, g->i1, g->j1};
    rep["sensitivity"] = s;
  }
  doc["report"] = rep;
  if (c.stitch) {
    json tiles = json::array();
    for (const auto &t : c.stitch->tiles)
      tiles.push_back({{"path", t.path}, {"offset", {t.offset_i, t.offset_j}}});
    doc["stitch"] = {{"tiles", tiles}, {"refine", c.stitch->refine}, {"search_radius", c.stitch->search_radius}};
  }
  return doc;
}

} // namespace nvscope::app
