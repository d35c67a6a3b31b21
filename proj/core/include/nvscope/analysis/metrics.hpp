#pragma once

#include <vector>

#include "nvscope/acquisition.hpp"
#include "nvscope/analysis/rabi_fit.hpp"

namespace nvscope::analysis {

/// 20 log10(b_max / b_min).
double dynamic_range_db(double b_min, double b_max);

struct InsertionLoss {
  double p_sim_dbm = 0.0;
  double loss_db = 0.0;
};

/// p_sim = 10 log10(j^2 z / 1 mW), loss = p_in - p_sim.
InsertionLoss insertion_loss_db(double p_in_dbm, double j_amp, double z_ohm);

/// Total time spent in pulse sequences for one cube: sum over dt of n_shots (laser + wait + dt),
/// counting reference and data exposures. Seconds.
double cube_measurement_time_s(const ImageCube &cube);

/// Per-pixel standard deviation of the fitted field across repeats times sqrt(measurement time),
/// median over pixels fitted in every repeat. T / sqrt(Hz).
double amplitude_sensitivity(const std::vector<ImageCube> &repeats, const FitConfig &cfg,
                             PolarizationComponent component = PolarizationComponent::SigmaMinus,
                             double gamma_hz_per_t = kGammaNv, unsigned threads = 0);

} // namespace nvscope::analysis
