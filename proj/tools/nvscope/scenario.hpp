#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nvscope/acquisition.hpp"
#include "nvscope/analysis/rabi_fit.hpp"
#include "nvscope/analysis/trap.hpp"
#include "nvscope/currents.hpp"
#include "nvscope/fieldcore.hpp"
#include "nvscope/nearfield.hpp"

namespace nvscope::app {

struct ScanSpec {
  double start_ns = 0.0;
  double stop_ns = 2000.0;
  int steps = 100;
};

struct StreamSpec {
  double dt_ns = 30.0;
  CameraTiming timing;
  std::vector<ScheduleEntry> schedule;
};

struct FitSpec {
  analysis::FitConfig config;
  std::optional<std::pair<double, double>> rabi_bounds_hz;  // as configured; sets omega_bounds
  double min_converged_fraction = 0.5;
};

struct ContourSpec {
  double dt_ns = 30.0;
  double threshold_fraction = 0.5;
  std::optional<std::pair<int, int>> anchor;
  bool noisy = false;
};

struct StitchTileSpec {
  std::string path;
  int offset_i = 0;
  int offset_j = 0;
};

struct StitchSpec {
  std::vector<StitchTileSpec> tiles;
  bool refine = false;
  int search_radius = 8;
};

struct SensitivitySpec {
  int repeats = 10;
  std::optional<analysis::PixelRegion> region;
};

struct ReportSpec {
  std::optional<double> p_in_dbm;
  double impedance_ohm = 50.0;
  std::optional<int> line_cut_row;
  std::optional<analysis::TrapOptions> trap;
  std::optional<std::pair<double, double>> dynamic_range;  // (b_min, b_max) in T
  std::optional<SensitivitySpec> sensitivity;
};

struct ScenarioConfig {
  std::string name;
  DeviceParams device;
  GridSpec grid;
  SensingLayer layer;
  double tilt_deg = 29.5;
  TiltPlane tilt_plane;
  double mw_frequency_hz = 2.77e9;
  BiasConfig bias{kZeroFieldSplitting, kGammaNv, -1};
  PulseParams pulse;
  DecayParams decay;
  std::optional<ScanSpec> scan;
  std::optional<std::uint64_t> seed;
  std::optional<StreamSpec> stream;
  FitSpec fit;
  std::optional<ContourSpec> contours;
  ReportSpec report;
  std::optional<StitchSpec> stitch;

  Transition transition() const { return bias.tuned_transition(); }
  PolarizationComponent component() const { return component_for(transition()); }
  NvFrame frame() const { return nv_frame_from_tilt(tilt_deg, tilt_plane); }
};

/// Parses a scenario document. Errors are ConfigError with the dotted field path.
ScenarioConfig parse_scenario(const nlohmann::json &doc);
ScenarioConfig load_scenario(const std::string &path);

/// Canonical document: every value present, unit suffixes chosen per quantity.
nlohmann::json scenario_to_json(const ScenarioConfig &cfg);

} // namespace nvscope::app
