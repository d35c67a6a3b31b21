#include "nvscope/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "nvscope/errors.hpp"
#include "nvscope/rng.hpp"

namespace nvscope {

void PulseParams::validate() const {
  if (!(laser_ns >= 0.0) || !(wait_ns >= 0.0))
    throw DomainError("laser and wait durations must be >= 0");
  if (n_shots < 1)
    throw DomainError("n_shots must be >= 1");
  if (!(c0 > 0.0 && c0 <= 1.0))
    throw DomainError("c0 must lie in (0, 1]");
  if (!(counts_ref > 0.0))
    throw DomainError("counts_ref must be positive");
  if (!(read_noise >= 0.0))
    throw DomainError("read noise must be >= 0");
}

DecayParams DecayParams::none() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {inf, inf, 0.5};
}

void DecayParams::validate() const {
  if (!(tau_fast_ns > 0.0) || !(tau_slow_ns > 0.0))
    throw DomainError("decay time constants must be positive");
  if (!(tau_fast_ns <= tau_slow_ns))
    throw DomainError("tau_fast must not exceed tau_slow");
  if (!(weight_fast >= 0.0 && weight_fast <= 1.0))
    throw DomainError("weight_fast must lie in [0, 1]");
}

double DecayParams::envelope(double t_ns) const {
  return weight_fast * std::exp(-t_ns / tau_fast_ns) +
         (1.0 - weight_fast) * std::exp(-t_ns / tau_slow_ns);
}

double rabi_omega(double b_tesla, double gamma_hz_per_t) {
  return 2.0 * std::numbers::pi * gamma_hz_per_t * b_tesla * 1e-9;
}

double field_from_omega(double omega_rad_per_ns, double gamma_hz_per_t) {
  return omega_rad_per_ns * 1e9 / (2.0 * std::numbers::pi * gamma_hz_per_t);
}

double contrast_at(double b_tesla, double dt_ns, const DecayParams &decay, double c0,
                   double gamma_hz_per_t) {
  const double s = std::sin(0.5 * rabi_omega(b_tesla, gamma_hz_per_t) * dt_ns);
  return c0 * decay.envelope(dt_ns) * s * s;
}

std::vector<double> simulate_contrast_image(const PolarizedFieldMap &bmap, double dt_ns,
                                            const PulseParams &pulse, const DecayParams &decay,
                                            std::optional<std::uint64_t> seed,
                                            std::uint64_t frame_index,
                                            std::span<const double> c0_map,
                                            double gamma_hz_per_t) {
  pulse.validate();
  decay.validate();
  if (bmap.values.size() != bmap.grid.size())
    throw DomainError("field map size does not match its grid");
  if (!c0_map.empty() && c0_map.size() != bmap.values.size())
    throw DomainError("c0 map size does not match the field map");
  if (!(dt_ns >= 0.0))
    throw DomainError("pulse duration must be >= 0");

  std::vector<double> out(bmap.values.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double c0 = c0_map.empty() ? pulse.c0 : pulse.c0 * c0_map[k];
    const double ideal = contrast_at(bmap.values[k], dt_ns, decay, c0, gamma_hz_per_t);
    if (!seed) {
      out[k] = ideal;
      continue;
    }
    CounterRng rng(*seed, frame_index, k);
    std::poisson_distribution<long long> ref_dist(pulse.counts_ref);
    const double ref_mean_data = pulse.counts_ref * (1.0 - ideal);
    double n_ref = static_cast<double>(ref_dist(rng));
    double n_data = ref_mean_data > 0.0
                        ? static_cast<double>(std::poisson_distribution<long long>(ref_mean_data)(rng))
                        : 0.0;
    if (pulse.read_noise > 0.0) {
      std::normal_distribution<double> read(0.0, pulse.read_noise);
      n_ref += read(rng);
      n_data += read(rng);
    }
    out[k] = n_ref > 0.0 ? std::min(1.0, 1.0 - n_data / n_ref) : 0.0;
  }
  return out;
}

void ImageCube::validate() const {
  grid.validate();
  if (dt_ns.empty())
    throw DomainError("image cube has no frames");
  if (frames.size() != dt_ns.size())
    throw DomainError("image cube frame count does not match its dt list");
  for (std::size_t k = 0; k < dt_ns.size(); ++k) {
    if (!(dt_ns[k] >= 0.0) || (k > 0 && !(dt_ns[k] > dt_ns[k - 1])))
      throw DomainError("dt list must be non-negative and strictly increasing");
    if (frames[k].size() != grid.size())
      throw DomainError("image cube frame has the wrong number of pixels");
  }
}

std::vector<double> ImageCube::trace(std::size_t pixel) const {
  std::vector<double> t(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k)
    t[k] = frames[k][pixel];
  return t;
}

std::vector<double> linear_scan(double start_ns, double stop_ns, int n) {
  if (n < 1)
    throw DomainError("scan needs at least one step");
  if (n > 1 && !(stop_ns > start_ns))
    throw DomainError("scan stop must exceed start");
  std::vector<double> dt(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    dt[static_cast<std::size_t>(k)] = n == 1 ? start_ns : start_ns + (stop_ns - start_ns) * k / (n - 1);
  return dt;
}

ImageCube simulate_cube(const PolarizedFieldMap &bmap, std::span<const double> dt_ns,
                        const PulseParams &pulse, const DecayParams &decay,
                        std::optional<std::uint64_t> seed, std::span<const double> c0_map,
                        double gamma_hz_per_t) {
  ImageCube cube;
  cube.grid = bmap.grid;
  cube.dt_ns.assign(dt_ns.begin(), dt_ns.end());
  cube.pulse = pulse;
  cube.seed = seed;
  cube.frames.reserve(dt_ns.size());
  for (std::size_t k = 0; k < dt_ns.size(); ++k)
    cube.frames.push_back(
        simulate_contrast_image(bmap, dt_ns[k], pulse, decay, seed, k, c0_map, gamma_hz_per_t));
  cube.validate();
  return cube;
}

void CameraTiming::validate() const {
  if (!(row_time_us > 0.0))
    throw DomainError("row time must be positive");
  if (!(overhead_us >= 0.0))
    throw DomainError("frame overhead must be >= 0");
}

CameraTiming calibrate_timing(int rows_a, double frame_ms_a, int rows_b, double frame_ms_b) {
  if (rows_a == rows_b)
    throw DomainError("timing calibration needs two distinct row counts");
  const double row_ms = (frame_ms_a - frame_ms_b) / static_cast<double>(rows_a - rows_b);
  const double overhead_ms = frame_ms_a - rows_a * row_ms;
  CameraTiming t{row_ms * 1e3, overhead_ms * 1e3};
  t.validate();
  return t;
}

double exposure_ms(const PulseParams &pulse, double dt_ns) {
  return pulse.n_shots * (pulse.laser_ns + pulse.wait_ns + dt_ns) * 1e-6;
}

double frame_time_ms(const CameraTiming &timing, int rows, const PulseParams &pulse, double dt_ns) {
  timing.validate();
  if (rows < 1)
    throw DomainError("frame needs at least one row");
  const double readout_ms = rows * timing.row_time_us * 1e-3;
  return std::max(readout_ms, exposure_ms(pulse, dt_ns)) + timing.overhead_us * 1e-3;
}

double schedule_duration(std::span<const ScheduleEntry> schedule) {
  double total = 0.0;
  for (const auto &e : schedule)
    total += e.duration_ms;
  return total;
}

bool schedule_state(std::span<const ScheduleEntry> schedule, double t_ms) {
  double start = 0.0;
  for (const auto &e : schedule) {
    if (t_ms >= start && t_ms < start + e.duration_ms)
      return e.on;
    start += e.duration_ms;
  }
  return false;
}

std::vector<StreamFrame> simulate_stream(const PolarizedFieldMap &bmap, double dt_ns,
                                         const PulseParams &pulse, const DecayParams &decay,
                                         std::span<const ScheduleEntry> schedule,
                                         const CameraTiming &timing, int rows,
                                         std::optional<std::uint64_t> seed,
                                         double gamma_hz_per_t) {
  for (const auto &e : schedule)
    if (!(e.duration_ms > 0.0))
      throw DomainError("schedule durations must be positive");
  const double period = frame_time_ms(timing, rows, pulse, dt_ns);
  const double exposure = exposure_ms(pulse, dt_ns);
  const double total = schedule_duration(schedule);

  PolarizedFieldMap off_map = bmap;
  std::fill(off_map.values.begin(), off_map.values.end(), 0.0);

  std::vector<StreamFrame> frames;
  for (std::uint64_t k = 0;; ++k) {
    const double start = static_cast<double>(k) * period;
    if (start + exposure > total)
      break;
    StreamFrame f;
    f.timestamp_ms = start + exposure / 2.0;
    f.mw_on = schedule_state(schedule, f.timestamp_ms);
    f.contrast = simulate_contrast_image(f.mw_on ? bmap : off_map, dt_ns, pulse, decay, seed, k,
                                         {}, gamma_hz_per_t);
    frames.push_back(std::move(f));
  }
  return frames;
}

} // namespace nvscope
