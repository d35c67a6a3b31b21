#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include "manifest.hpp"
#include "nvscope/analysis/contours.hpp"
#include "nvscope/analysis/metrics.hpp"
#include "nvscope/analysis/stitch.hpp"
#include "nvscope/analysis/trap.hpp"
#include "nvscope/io/fmap.hpp"
#include "nvscope/io/pgm.hpp"
#include "nvscope/io/rcub.hpp"
#include "nvscope/parallel.hpp"
#include "scenario.hpp"

namespace nvscope::app {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Context {
  const GlobalOptions &opts;
  ScenarioConfig cfg;
  std::string config_bytes;
  RunManifest manifest;
  OutputWriter writer;
  std::ostream &out;
  unsigned threads;

  std::optional<std::uint64_t> seed() const { return opts.seed ? opts.seed : cfg.seed; }
};

std::string map_file(PolarizationComponent c) {
  switch (c) {
  case PolarizationComponent::SigmaPlus:
    return "sigma_plus.fmap";
  case PolarizationComponent::SigmaMinus:
    return "sigma_minus.fmap";
  case PolarizationComponent::Axial:
    break;
  }
  return "axial.fmap";
}

fs::path input_path(const Context &ctx, const std::string &default_name) {
  return ctx.opts.input ? *ctx.opts.input : ctx.opts.output_dir / default_name;
}

PolarizedFieldMap load_map(const fs::path &p) {
  if (!fs::exists(p))
    throw ConfigError("input", "field map " + p.string() + " not found (run simulate first or pass --input)");
  return io::decode_polarized_map(read_file(p));
}

double device_current(const DeviceParams &d) {
  return std::visit([](const auto &p) { return std::abs(p.current); }, d);
}

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json pgm_details(const io::PgmScaling &s, const char *unit) {
  return {{"offset", s.offset}, {"scale_per_unit", s.scale}, {"maxval", s.maxval}, {"unit", unit},
          {"mapping", "grey = round((value - offset) * scale_per_unit); rows flipped so +v is up"}};
}

int cmd_simulate(Context &ctx) {
  const auto &c = ctx.cfg;
  const CurrentModel model = build_device(c.device);
  const FieldPhasorMap phasor = evaluate_phasor_map(model, c.grid, c.layer, ctx.threads);
  const NvFrame frame = c.frame();
  const auto plus = project_polarization(phasor, frame, PolarizationComponent::SigmaPlus);
  const auto minus = project_polarization(phasor, frame, PolarizationComponent::SigmaMinus);
  const auto axial = project_polarization(phasor, frame, PolarizationComponent::Axial);
  ctx.writer.write("phasor.fmap", io::encode_fmap(phasor));
  ctx.writer.write("sigma_plus.fmap", io::encode_fmap(plus));
  ctx.writer.write("sigma_minus.fmap", io::encode_fmap(minus));
  ctx.writer.write("axial.fmap", io::encode_fmap(axial));
  const auto &tuned = c.component() == PolarizationComponent::SigmaPlus ? plus : minus;
  io::PgmScaling scaling;
  ctx.writer.write("tuned_map.pgm", io::encode_pgm16(tuned.values, c.grid.nx, c.grid.ny, &scaling));
  const double bias = bias_field_for_frequency(c.mw_frequency_hz, c.transition(), c.bias);
  const double peak = *std::max_element(tuned.values.begin(), tuned.values.end());
  const json summary = {{"transition", std::string(to_string(c.transition()))},
                        {"bias_field_t", bias},
                        {"tuned_max_t", peak},
                        {"segments", model.segments.size()}};
  ctx.writer.write("simulate.json", summary.dump(2) + "\n");
  ctx.manifest.details = {{"pgm", pgm_details(scaling, "T")}, {"summary", summary}};
  ctx.out << "simulated " << c.grid.nx << "x" << c.grid.ny << " map, " << model.segments.size()
          << " segments; tuned " << to_string(c.transition()) << " peak " << fmt("%.3f", peak * 1e6)
          << " uT, bias " << fmt("%.1f", bias * 1e6) << " uT\n";
  return kExitOk;
}

int cmd_acquire(Context &ctx) {
  const auto &c = ctx.cfg;
  if (!c.scan && !c.stream)
    throw ConfigError("scan", "nothing to acquire: give a scan or a stream section");
  const PolarizedFieldMap map = load_map(input_path(ctx, map_file(c.component())));
  json details = json::object();
  if (c.scan) {
    const auto dt = linear_scan(c.scan->start_ns, c.scan->stop_ns, c.scan->steps);
    const ImageCube cube = simulate_cube(map, dt, c.pulse, c.decay, ctx.seed(), {}, c.bias.gamma_hz_per_t);
    ctx.writer.write("cube.rcub", io::encode_rcub(cube));
    details["cube_frames"] = cube.frames.size();
    ctx.out << "acquired cube: " << cube.frames.size() << " frames of " << map.grid.nx << "x"
            << map.grid.ny << "\n";
  }
  if (c.stream) {
    const auto &s = *c.stream;
    const auto frames = simulate_stream(map, s.dt_ns, c.pulse, c.decay, s.schedule, s.timing,
                                        map.grid.ny, ctx.seed(), c.bias.gamma_hz_per_t);
    ctx.writer.write("stream.rcubs", io::encode_stream(map.grid, s.dt_ns, c.pulse, ctx.seed(), frames));
    const double ft = frame_time_ms(s.timing, map.grid.ny, c.pulse, s.dt_ns);
    details["stream_frames"] = frames.size();
    details["frame_time_ms"] = ft;
    ctx.out << "acquired stream: " << frames.size() << " frames at " << fmt("%.3f", ft) << " ms\n";
  }
  ctx.manifest.details = details;
  return kExitOk;
}

int cmd_fit(Context &ctx) {
  const auto &c = ctx.cfg;
  const fs::path in = input_path(ctx, "cube.rcub");
  if (!fs::exists(in))
    throw ConfigError("input", "cube " + in.string() + " not found (run acquire first or pass --input)");
  const ImageCube cube = io::decode_rcub(read_file(in));
  const auto fit = analysis::fit_cube(cube, c.fit.config, c.component(), c.bias.gamma_hz_per_t, ctx.threads);
  const auto s = fit.summary();

  static const std::vector<std::string> kChannels{
      "field_t",     "offset",      "amp_fast", "amp_slow", "tau_fast_ns", "tau_slow_ns",
      "omega_rad_per_ns", "phase", "baseline", "residual_rms", "status"};
  std::vector<float> params;
  params.reserve(fit.params.size() * kChannels.size());
  for (std::size_t k = 0; k < fit.params.size(); ++k) {
    const auto &p = fit.params[k];
    for (double v : {fit.field.values[k], p.offset, p.amp_fast, p.amp_slow, p.tau_fast_ns,
                     p.tau_slow_ns, p.omega, p.phase, p.baseline, p.residual_rms,
                     static_cast<double>(static_cast<int>(fit.status[k]))})
      params.push_back(static_cast<float>(v));
  }
  ctx.writer.write("field_fit.fmap", io::encode_fmap(fit.field));
  ctx.writer.write("fit_params.fmap",
                   io::encode_fmap(cube.grid, kChannels, params,
                                   {{"status_codes", {"converged", "not_converged", "below_threshold"}}}));
  const json diag = {{"pixels", s.pixels},
                     {"converged", s.converged},
                     {"not_converged", s.not_converged},
                     {"below_threshold", s.below_threshold},
                     {"converged_fraction", s.converged_fraction},
                     {"median_residual", s.median_residual},
                     {"component", std::string(to_string(fit.field.component))},
                     {"min_converged_fraction", c.fit.min_converged_fraction}};
  ctx.writer.write("fit_diagnostics.json", diag.dump(2) + "\n");
  io::PgmScaling scaling;
  ctx.writer.write("field_fit.pgm", io::encode_pgm16(fit.field.values, cube.grid.nx, cube.grid.ny, &scaling));
  ctx.manifest.details = {{"pgm", pgm_details(scaling, "T")}, {"diagnostics", diag}};
  ctx.out << "fitted " << s.pixels << " pixels: " << s.converged << " converged, " << s.not_converged
          << " not converged, " << s.below_threshold << " below threshold\n";
  if (s.converged_fraction < c.fit.min_converged_fraction) {
    ctx.out << "converged fraction " << fmt("%.4f", s.converged_fraction) << " below floor "
            << fmt("%.4f", c.fit.min_converged_fraction) << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_contours(Context &ctx) {
  const auto &c = ctx.cfg;
  const analysis::ContourOptions defaults;
  const ContourSpec spec = c.contours.value_or(ContourSpec{});
  const PolarizedFieldMap map = load_map(input_path(ctx, map_file(c.component())));
  const auto seed = spec.noisy ? ctx.seed() : std::nullopt;
  if (spec.noisy && !seed)
    throw ConfigError("contours.noisy", "noisy contour frames need a seed");
  const auto frame = simulate_contrast_image(map, spec.dt_ns, c.pulse, c.decay, seed, 0, {},
                                             c.bias.gamma_hz_per_t);
  analysis::ContourOptions o;
  o.threshold_fraction = spec.threshold_fraction;
  o.gamma_hz_per_t = c.bias.gamma_hz_per_t;
  o.anchor = spec.anchor;
  const auto set = analysis::extract_contours(frame, map.grid.nx, map.grid.ny, spec.dt_ns, o);
  std::vector<float> f(frame.begin(), frame.end());
  ctx.writer.write("iso_b_frame.fmap", io::encode_fmap(map.grid, {"contrast"}, f, {{"dt_ns", spec.dt_ns}}));
  json levels = json::array();
  for (const auto &[m, b] : set.levels())
    levels.push_back({{"m", m}, {"b_t", b}});
  json ridges = json::array();
  for (const auto &r : set.ridges) {
    json pts = json::array();
    for (const auto &p : r.points)
      pts.push_back({p.i, p.j});
    ridges.push_back({{"m", r.m}, {"b_label_t", r.b_label}, {"points", pts}});
  }
  const json doc = {{"dt_ns", set.dt_mw_ns}, {"order_step", set.order_step}, {"levels", levels},
                    {"ridges", ridges}};
  ctx.writer.write("contours.json", doc.dump() + "\n");
  io::PgmScaling scaling;
  ctx.writer.write("iso_b_frame.pgm", io::encode_pgm16(frame, map.grid.nx, map.grid.ny, &scaling));
  ctx.manifest.details = {{"pgm", pgm_details(scaling, "contrast")}, {"ridges", set.ridges.size()}};
  ctx.out << "found " << set.ridges.size() << " ridges at dt = " << spec.dt_ns << " ns\n";
  for (const auto &[m, b] : set.levels())
    ctx.out << "  m = " << m << ": " << fmt("%.2f", b * 1e6) << " uT\n";
  return kExitOk;
}

int cmd_stitch(Context &ctx) {
  const auto &c = ctx.cfg;
  if (!c.stitch)
    throw ConfigError("stitch", "required section is missing");
  const fs::path base = fs::path(ctx.opts.config_path).parent_path();
  std::vector<analysis::StitchTile> tiles;
  for (const auto &t : c.stitch->tiles) {
    const fs::path p = fs::path(t.path).is_absolute() ? fs::path(t.path) : base / t.path;
    if (!fs::exists(p))
      throw ConfigError("stitch.tiles", "tile " + p.string() + " not found");
    tiles.push_back({io::decode_polarized_map(read_file(p)), t.offset_i, t.offset_j});
  }
  analysis::StitchOptions o;
  o.refine = c.stitch->refine;
  o.search_radius = c.stitch->search_radius;
  const auto res = analysis::stitch(tiles, o);
  ctx.writer.write("stitched.fmap", io::encode_fmap(res.map));
  json offs = json::array();
  for (const auto &[i, j] : res.offsets)
    offs.push_back({i, j});
  ctx.manifest.details = {{"offsets", offs}};
  ctx.out << "stitched " << tiles.size() << " tiles into " << res.map.grid.nx << "x" << res.map.grid.ny << "\n";
  return kExitOk;
}

std::vector<double> line_peaks(const std::vector<double> &x, const std::vector<double> &b) {
  std::vector<double> peaks;
  const double top = *std::max_element(b.begin(), b.end());
  for (std::size_t k = 1; k + 1 < b.size(); ++k)
    if (b[k] >= 0.5 * top && b[k] > b[k - 1] && b[k] >= b[k + 1])
      peaks.push_back(x[k]);
  return peaks;
}

int cmd_report(Context &ctx) {
  const auto &c = ctx.cfg;
  const PolarizedFieldMap map = load_map(input_path(ctx, map_file(c.component())));
  const auto &g = map.grid;
  json rep = {{"scenario", c.name}, {"component", std::string(to_string(map.component))}};
  std::ostringstream txt;
  txt << "scenario " << c.name << "\n";

  const int row = c.report.line_cut_row.value_or(g.ny / 2);
  if (row < 0 || row >= g.ny)
    throw DomainError("line cut row " + std::to_string(row) + " lies outside the grid");
  std::vector<double> xs, bs;
  std::string cut = "# position_um field_ut\n";
  for (int i = 0; i < g.nx; ++i) {
    const double x = dot(g.pixel_center(i, row), g.axis_u) * 1e6;
    xs.push_back(x);
    bs.push_back(map.at(i, row) * 1e6);
    cut += fmt("%.4f", x) + " " + fmt("%.6f", map.at(i, row) * 1e6) + "\n";
  }
  ctx.writer.write("linecut.txt", cut);
  const auto peaks = line_peaks(xs, bs);
  rep["line_cut"] = {{"row", row}, {"peak_positions_um", peaks}, {"max_ut", *std::max_element(bs.begin(), bs.end())}};
  txt << "line cut row " << row << ": max " << fmt("%.3f", *std::max_element(bs.begin(), bs.end())) << " uT\n";

  if (c.report.p_in_dbm) {
    const double j = device_current(c.device);
    const auto il = analysis::insertion_loss_db(*c.report.p_in_dbm, j, c.report.impedance_ohm);
    rep["insertion_loss"] = {{"p_in_dbm", *c.report.p_in_dbm}, {"current_a", j},
                             {"impedance_ohm", c.report.impedance_ohm},
                             {"p_sim_dbm", il.p_sim_dbm}, {"loss_db", il.loss_db}};
    txt << "simulated power " << fmt("%.3f", il.p_sim_dbm) << " dBm, insertion loss "
        << fmt("%.3f", il.loss_db) << " dB\n";
  }
  if (c.report.trap) {
    const auto t = analysis::characterize_trap(map, *c.report.trap);
    const auto grad = [](const std::optional<double> &v) { return v ? json(*v) : json(nullptr); };
    rep["trap"] = {{"pixel", {t.i, t.j}},
                   {"position_m", {t.position.x, t.position.y, t.position.z}},
                   {"field_t", t.field},
                   {"gradient_t_per_m",
                    {{"u_minus", grad(t.grad_u_minus)}, {"u_plus", grad(t.grad_u_plus)},
                     {"v_minus", grad(t.grad_v_minus)}, {"v_plus", grad(t.grad_v_plus)}}}};
    txt << "trap minimum at pixel (" << t.i << ", " << t.j << "), " << fmt("%.3f", t.field * 1e6) << " uT\n";
    for (const auto &[name, v] : {std::pair{"u-", t.grad_u_minus}, std::pair{"u+", t.grad_u_plus},
                                  std::pair{"v-", t.grad_v_minus}, std::pair{"v+", t.grad_v_plus}})
      txt << "  gradient " << name << ": " << (v ? fmt("%.4f", *v) + " uT/um" : std::string("n/a")) << "\n";
  }
  if (c.report.dynamic_range) {
    const auto [lo, hi] = *c.report.dynamic_range;
    const double db = analysis::dynamic_range_db(lo, hi);
    rep["dynamic_range"] = {{"b_min_t", lo}, {"b_max_t", hi}, {"db", db}};
    txt << "dynamic range " << fmt("%.3f", db) << " dB\n";
  }
  if (c.report.sensitivity) {
    if (!c.scan)
      throw ConfigError("report.sensitivity", "needs a scan section");
    PolarizedFieldMap sub = map;
    if (const auto &r = c.report.sensitivity->region) {
      if (r->i0 < 0 || r->j0 < 0 || r->i1 > g.nx || r->j1 > g.ny || r->i0 >= r->i1 || r->j0 >= r->j1)
        throw DomainError("sensitivity region lies outside the grid");
      sub.grid.origin = g.pixel_center(r->i0, r->j0) - (g.axis_u + g.axis_v) * (0.5 * g.pitch);
      sub.grid.nx = r->i1 - r->i0;
      sub.grid.ny = r->j1 - r->j0;
      sub.values.clear();
      for (int j = r->j0; j < r->j1; ++j)
        for (int i = r->i0; i < r->i1; ++i)
          sub.values.push_back(map.at(i, j));
    }
    const auto dt = linear_scan(c.scan->start_ns, c.scan->stop_ns, c.scan->steps);
    const std::uint64_t base = ctx.seed().value_or(0);
    std::vector<ImageCube> repeats;
    for (int k = 0; k < c.report.sensitivity->repeats; ++k)
      repeats.push_back(simulate_cube(sub, dt, c.pulse, c.decay, base + static_cast<std::uint64_t>(k), {},
                                      c.bias.gamma_hz_per_t));
    const double s = analysis::amplitude_sensitivity(repeats, c.fit.config, map.component,
                                                     c.bias.gamma_hz_per_t, ctx.threads);
    rep["sensitivity_t_per_sqrt_hz"] = s;
    txt << "amplitude sensitivity " << fmt("%.4g", s * 1e9) << " nT/sqrt(Hz)\n";
  }
  const fs::path fitted = ctx.opts.output_dir / "field_fit.fmap";
  if (fs::exists(fitted) && c.scan) {
    const auto fit = io::decode_polarized_map(read_file(fitted));
    if (fit.grid == map.grid) {
      const double floor = 1.0 / (c.bias.gamma_hz_per_t * (c.scan->stop_ns - c.scan->start_ns) * 1e-9);
      double s2 = 0.0;
      std::size_t n = 0;
      for (std::size_t k = 0; k < map.values.size(); ++k)
        if (map.values[k] >= floor && fit.values[k] > 0.0) {
          const double e = (fit.values[k] - map.values[k]) / map.values[k];
          s2 += e * e;
          ++n;
        }
      const double rms = n ? std::sqrt(s2 / static_cast<double>(n)) : 0.0;
      rep["fit_vs_simulation"] = {{"detection_floor_t", floor}, {"pixels", n}, {"rms_relative_error", rms}};
      txt << "fit vs simulation: " << fmt("%.4f", rms * 100) << " % rms over " << n << " pixels\n";
    }
  }
  ctx.writer.write("report.json", rep.dump(2) + "\n");
  ctx.writer.write("report.txt", txt.str());
  ctx.out << txt.str();
  return kExitOk;
}

using Handler = int (*)(Context &);

const std::map<std::string, Handler, std::less<>> &handlers() {
  static const std::map<std::string, Handler, std::less<>> h{
      {"simulate", cmd_simulate}, {"acquire", cmd_acquire}, {"fit", cmd_fit},
      {"stitch", cmd_stitch},     {"report", cmd_report},   {"contours", cmd_contours}};
  return h;
}

} // namespace

int run_command(std::string_view command, const GlobalOptions &opts, std::ostream &out,
                std::ostream &err) {
  const auto &h = handlers();
  const auto it = h.find(command);
  if (it == h.end()) {
    err << "unknown command '" << command << "'\n";
    return kExitConfig;
  }
  if (opts.verify) {
    const auto report = verify_manifest(manifest_path(opts.output_dir, command));
    for (const auto &p : report.problems)
      err << "verify: " << p << "\n";
    if (!report.ok)
      return kExitVerify;
    out << "verify: all outputs of " << command << " match the manifest\n";
    return kExitOk;
  }
  try {
    if (opts.config_path.empty())
      throw ConfigError("--config", "a scenario config is required");
    std::string bytes;
    try {
      bytes = read_file(opts.config_path);
    } catch (const Error &e) {
      throw ConfigError("--config", e.what());
    }
    Context ctx{opts, load_scenario(opts.config_path), bytes, {}, OutputWriter(opts.output_dir), out,
                resolve_threads(opts.threads)};
    ctx.manifest.command = std::string(command);
    ctx.manifest.config_path = opts.config_path;
    ctx.manifest.config_sha256 = sha256_hex(bytes);
    ctx.manifest.started_utc = utc_now();
    ctx.manifest.seed = ctx.seed();
    const int code = it->second(ctx);
    ctx.manifest.outputs = ctx.writer.records();
    ctx.manifest.finished_utc = utc_now();
    json m = ctx.manifest.to_json();
    m["config"] = scenario_to_json(ctx.cfg);
    write_atomic(manifest_path(opts.output_dir, command), m.dump(2) + "\n");
    return code;
  } catch (const FormatError &e) {
    err << "format error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError &e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SingularityError &e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NotConverged &e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NotFound &e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

} // namespace nvscope::app
