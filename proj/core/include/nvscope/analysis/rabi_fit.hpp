#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nvscope/acquisition.hpp"
#include "nvscope/fieldcore.hpp"
#include "nvscope/nearfield.hpp"

namespace nvscope::analysis {

enum class EnvelopeMode { DoubleExp, SingleExp };

struct FitConfig {
  int max_iterations = 200;
  double rel_tolerance = 1e-10;
  /// (min, max) in rad/ns. Defaults to (2 pi 0.1 MHz, Nyquist of the mean sample spacing).
  std::optional<std::pair<double, double>> omega_bounds;
  /// Periodogram peak power over the median power; below this the trace is "no oscillation".
  double min_contrast_snr = 30.0;
  /// Free phase phi in sin(Omega t + phi). Off reproduces the printed model exactly.
  bool allow_phase = true;
  /// Baseline coupling kappa in y = A - E(t) (kappa + sin(Omega t + phi)). Lets the offset follow
  /// the coherence envelope of a (1 - cos)-shaped population signal. Off pins kappa = 0.
  bool track_baseline = true;
  EnvelopeMode envelope_mode = EnvelopeMode::DoubleExp;

  void validate() const;
};

/// Parameters of y = A - (B exp(-t/tau_f) + C exp(-t/tau_s)) (kappa + sin(Omega t + phi)).
struct RabiFitResult {
  double offset = 0.0;    // A
  double amp_fast = 0.0;  // B
  double amp_slow = 0.0;  // C
  double tau_fast_ns = 0.0;
  double tau_slow_ns = 0.0;
  double omega = 0.0;  // rad/ns
  double phase = 0.0;  // rad
  double baseline = 0.0;  // kappa
  double residual_rms = 0.0;
  bool converged = false;
  EnvelopeMode envelope = EnvelopeMode::DoubleExp;
  int iterations = 0;

  double evaluate(double t_ns) const;
};

struct FrequencySeed {
  double omega = 0.0;  // rad/ns, parabolic-interpolated peak
  double amplitude = 0.0;
  double phase = 0.0;  // arg of the DFT at the peak
  double snr = 0.0;    // peak power / median power
};

/// Periodogram of the mean-subtracted trace on a x4 zero-padded frequency grid from 0 to the
/// Nyquist frequency of the mean sample spacing (a direct sum, so uneven spacing is allowed).
/// Equal peaks resolve to the lower frequency.
FrequencySeed periodogram_seed(std::span<const double> t_ns, std::span<const double> y);

enum class FitStatus { Converged, NotConverged, BelowThreshold };

struct FitOutcome {
  FitStatus status = FitStatus::BelowThreshold;
  RabiFitResult result;
  double seed_snr = 0.0;
  std::string message;
};

/// Non-throwing fit. BelowThreshold results carry only the seed information.
FitOutcome try_fit_pixel(std::span<const double> t_ns, std::span<const double> y,
                         const FitConfig &cfg);

/// Throws NoOscillation or NotConverged.
RabiFitResult fit_pixel(std::span<const double> t_ns, std::span<const double> y,
                        const FitConfig &cfg);

struct CubeFitSummary {
  std::size_t pixels = 0;
  std::size_t converged = 0;
  std::size_t not_converged = 0;
  std::size_t below_threshold = 0;
  double converged_fraction = 0.0;
  double median_residual = 0.0;  // over fitted (non-threshold) pixels
};

struct CubeFit {
  PolarizedFieldMap field;  // B = Omega / (2 pi gamma); 0 where below threshold
  std::vector<RabiFitResult> params;
  std::vector<FitStatus> status;

  CubeFitSummary summary() const;
};

CubeFit fit_cube(const ImageCube &cube, const FitConfig &cfg,
                 PolarizationComponent component = PolarizationComponent::SigmaMinus,
                 double gamma_hz_per_t = kGammaNv, unsigned threads = 0);

} // namespace nvscope::analysis
