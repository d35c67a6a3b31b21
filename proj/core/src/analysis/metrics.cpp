#include "nvscope/analysis/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "nvscope/errors.hpp"

namespace nvscope::analysis {

double dynamic_range_db(double b_min, double b_max) {
  if (!(b_min > 0.0) || !(b_max >= b_min) || !std::isfinite(b_max))
    throw DomainError("dynamic range needs 0 < b_min <= b_max");
  return 20.0 * std::log10(b_max / b_min);
}

InsertionLoss insertion_loss_db(double p_in_dbm, double j_amp, double z_ohm) {
  if (!(j_amp > 0.0) || !(z_ohm > 0.0))
    throw DomainError("current and impedance must be positive");
  InsertionLoss r;
  r.p_sim_dbm = 10.0 * std::log10(j_amp * j_amp * z_ohm / 1e-3);
  r.loss_db = p_in_dbm - r.p_sim_dbm;
  return r;
}

double cube_measurement_time_s(const ImageCube &cube) {
  double ns = 0.0;
  for (double dt : cube.dt_ns)
    ns += 2.0 * cube.pulse.n_shots * (cube.pulse.laser_ns + cube.pulse.wait_ns + dt);
  return ns * 1e-9;
}

double amplitude_sensitivity(const std::vector<ImageCube> &repeats, const FitConfig &cfg,
                             PolarizationComponent component, double gamma_hz_per_t,
                             unsigned threads) {
  if (repeats.size() < 10)
    throw DomainError("amplitude sensitivity needs at least 10 repeats");
  const auto &first = repeats.front();
  for (const auto &c : repeats)
    if (!(c.grid == first.grid) || c.dt_ns != first.dt_ns)
      throw DomainError("repeats must share grid and scan");

  const std::size_t n = first.grid.size();
  std::vector<double> mean(n, 0.0), m2(n, 0.0);
  std::vector<int> count(n, 0);
  for (const auto &cube : repeats) {
    const CubeFit fit = fit_cube(cube, cfg, component, gamma_hz_per_t, threads);
    for (std::size_t k = 0; k < n; ++k) {
      if (fit.status[k] != FitStatus::Converged)
        continue;
      const double b = fit.field.values[k];
      ++count[k];
      const double d = b - mean[k];
      mean[k] += d / count[k];
      m2[k] += d * (b - mean[k]);
    }
  }
  std::vector<double> sigma;
  for (std::size_t k = 0; k < n; ++k)
    if (count[k] == static_cast<int>(repeats.size()))
      sigma.push_back(std::sqrt(m2[k] / (count[k] - 1)));
  if (sigma.empty())
    throw NotConverged("no pixel was fitted in every repeat");
  const auto mid = sigma.begin() + static_cast<std::ptrdiff_t>(sigma.size() / 2);
  std::nth_element(sigma.begin(), mid, sigma.end());
  double med = *mid;
  if (sigma.size() % 2 == 0)
    med = 0.5 * (med + *std::max_element(sigma.begin(), mid));
  return med * std::sqrt(cube_measurement_time_s(first));
}

} // namespace nvscope::analysis
