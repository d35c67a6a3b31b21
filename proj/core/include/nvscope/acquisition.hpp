#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nvscope/fieldcore.hpp"
#include "nvscope/nearfield.hpp"

namespace nvscope {

/// Per-exposure pulse sequence and detection parameters.
struct PulseParams {
  double laser_ns = 700.0;
  double wait_ns = 1500.0;
  int n_shots = 100;
  double c0 = 0.05;           // maximum contrast
  double counts_ref = 1e4;    // mean reference counts per pixel per exposure
  double read_noise = 0.0;    // additive Gaussian noise, counts rms (0 = off)

  void validate() const;
};

/// Double-exponential coherence envelope.
struct DecayParams {
  double tau_fast_ns = 300.0;
  double tau_slow_ns = 3000.0;
  double weight_fast = 0.5;

  /// No decay (infinite time constants).
  static DecayParams none();
  void validate() const;
  double envelope(double t_ns) const;
};

/// Rabi angular frequency (rad/ns) for a polarized amplitude b (T).
double rabi_omega(double b_tesla, double gamma_hz_per_t = kGammaNv);
/// Inverse of rabi_omega: B = Omega / (2 pi gamma).
double field_from_omega(double omega_rad_per_ns, double gamma_hz_per_t = kGammaNv);

/// Noiseless contrast c0 env(dt) sin^2(Omega dt / 2).
double contrast_at(double b_tesla, double dt_ns, const DecayParams &decay, double c0,
                   double gamma_hz_per_t = kGammaNv);

/// One contrast image (row-major like the map). With a seed, reference and data counts are drawn
/// as Poisson variates keyed by (seed, frame_index, pixel) and C = 1 - N_data / N_ref.
/// `c0_map`, when non-empty, scales c0 per pixel (laser inhomogeneity).
std::vector<double> simulate_contrast_image(const PolarizedFieldMap &bmap, double dt_ns,
                                            const PulseParams &pulse, const DecayParams &decay,
                                            std::optional<std::uint64_t> seed,
                                            std::uint64_t frame_index = 0,
                                            std::span<const double> c0_map = {},
                                            double gamma_hz_per_t = kGammaNv);

/// Stack of contrast frames over a scan of microwave pulse durations.
struct ImageCube {
  GridSpec grid;
  std::vector<double> dt_ns;
  std::vector<std::vector<double>> frames;
  PulseParams pulse;
  std::optional<std::uint64_t> seed;

  void validate() const;
  /// Contrast trace of one pixel across the scan.
  std::vector<double> trace(std::size_t pixel) const;
};

/// `n` evenly spaced durations from start to stop inclusive.
std::vector<double> linear_scan(double start_ns, double stop_ns, int n);

ImageCube simulate_cube(const PolarizedFieldMap &bmap, std::span<const double> dt_ns,
                        const PulseParams &pulse, const DecayParams &decay,
                        std::optional<std::uint64_t> seed, std::span<const double> c0_map = {},
                        double gamma_hz_per_t = kGammaNv);

/// Camera readout model: frame_time = max(rows row_time, exposure) + overhead.
struct CameraTiming {
  double row_time_us = 10.0;
  double overhead_us = 200.0;

  void validate() const;
};

/// Solves row_time and overhead from two (rows, frame time) observations in the readout-limited
/// regime.
CameraTiming calibrate_timing(int rows_a, double frame_ms_a, int rows_b, double frame_ms_b);

/// n_shots (laser + wait + dt) in ms.
double exposure_ms(const PulseParams &pulse, double dt_ns);
double frame_time_ms(const CameraTiming &timing, int rows, const PulseParams &pulse, double dt_ns);

struct ScheduleEntry {
  double duration_ms = 0.0;
  bool on = false;
};

/// Microwave state at time t (ms) from the start of the schedule; false past its end.
bool schedule_state(std::span<const ScheduleEntry> schedule, double t_ms);
double schedule_duration(std::span<const ScheduleEntry> schedule);

struct StreamFrame {
  double timestamp_ms = 0.0;  // exposure midpoint
  bool mw_on = false;
  std::vector<double> contrast;
};

/// Iso-B frames at dt_mw taken back-to-back at the camera frame time while the microwave follows
/// `schedule`. Each frame's state is sampled at its exposure midpoint.
std::vector<StreamFrame> simulate_stream(const PolarizedFieldMap &bmap, double dt_ns,
                                         const PulseParams &pulse, const DecayParams &decay,
                                         std::span<const ScheduleEntry> schedule,
                                         const CameraTiming &timing, int rows,
                                         std::optional<std::uint64_t> seed,
                                         double gamma_hz_per_t = kGammaNv);

} // namespace nvscope
