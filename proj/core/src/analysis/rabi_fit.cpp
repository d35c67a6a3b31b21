#include "nvscope/analysis/rabi_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "nvscope/errors.hpp"
#include "nvscope/parallel.hpp"

namespace nvscope::analysis {
namespace {

constexpr double kPi = std::numbers::pi;

// Full parameter vector layout.
enum Param : int { kA = 0, kB, kC, kLogTauF, kLogTauS, kOmega, kPhase, kKappa, kNumParams };
using Params = std::array<double, kNumParams>;

struct Bounds {
  double omega_lo;
  double omega_hi;
  double log_tau_lo;
  double log_tau_hi;
};

struct Problem {
  std::span<const double> t;
  std::span<const double> y;
  std::vector<int> active;
  Bounds bounds;
};

double model_value(const Params &p, double t) {
  const double ef = std::exp(-t / std::exp(p[kLogTauF]));
  const double es = std::exp(-t / std::exp(p[kLogTauS]));
  const double env = p[kB] * ef + p[kC] * es;
  return p[kA] - env * (p[kKappa] + std::sin(p[kOmega] * t + p[kPhase]));
}

double cost(const Problem &pr, const Params &p) {
  double s = 0.0;
  for (std::size_t k = 0; k < pr.t.size(); ++k) {
    const double r = model_value(p, pr.t[k]) - pr.y[k];
    s += r * r;
  }
  return s;
}

/// Residuals and Jacobian over the active parameters.
void linearize(const Problem &pr, const Params &p, Eigen::VectorXd &r, Eigen::MatrixXd &J) {
  const auto n = static_cast<Eigen::Index>(pr.t.size());
  const auto m = static_cast<Eigen::Index>(pr.active.size());
  r.resize(n);
  J.resize(n, m);
  const double tau_f = std::exp(p[kLogTauF]);
  const double tau_s = std::exp(p[kLogTauS]);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = pr.t[static_cast<std::size_t>(k)];
    const double ef = std::exp(-t / tau_f);
    const double es = std::exp(-t / tau_s);
    const double arg = p[kOmega] * t + p[kPhase];
    const double s = std::sin(arg);
    const double c = std::cos(arg);
    const double env = p[kB] * ef + p[kC] * es;
    const double osc = p[kKappa] + s;
    r(k) = p[kA] - env * osc - pr.y[static_cast<std::size_t>(k)];
    for (Eigen::Index a = 0; a < m; ++a) {
      double d = 0.0;
      switch (pr.active[static_cast<std::size_t>(a)]) {
      case kA:
        d = 1.0;
        break;
      case kB:
        d = -ef * osc;
        break;
      case kC:
        d = -es * osc;
        break;
      case kLogTauF:
        d = -p[kB] * ef * (t / tau_f) * osc;
        break;
      case kLogTauS:
        d = -p[kC] * es * (t / tau_s) * osc;
        break;
      case kOmega:
        d = -env * c * t;
        break;
      case kPhase:
        d = -env * c;
        break;
      case kKappa:
        d = -env;
        break;
      default:
        break;
      }
      J(k, a) = d;
    }
  }
}

void project(Params &p, const Bounds &b) {
  p[kOmega] = std::clamp(p[kOmega], b.omega_lo, b.omega_hi);
  p[kLogTauF] = std::clamp(p[kLogTauF], b.log_tau_lo, b.log_tau_hi);
  p[kLogTauS] = std::clamp(p[kLogTauS], b.log_tau_lo, b.log_tau_hi);
}

struct LmResult {
  Params p;
  double cost = 0.0;
  bool converged = false;
  int iterations = 0;
  Eigen::MatrixXd jtj;  // at the solution
};

LmResult levenberg_marquardt(const Problem &pr, Params p, const FitConfig &cfg, double y_scale) {
  project(p, pr.bounds);
  const auto m = static_cast<Eigen::Index>(pr.active.size());
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  linearize(pr, p, r, J);
  double current = r.squaredNorm();
  // Zero-residual floor relative to the signal energy, so the test is invariant to scaling.
  const double floor = 1e-28 * std::max(y_scale, 1e-300);
  double lambda = 1e-3;
  LmResult out{p, current, false, 0, {}};

  for (int it = 0; it < cfg.max_iterations; ++it) {
    out.iterations = it + 1;
    if (current <= floor) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd jtj = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    Eigen::VectorXd diag = jtj.diagonal();
    const double dmax = std::max(diag.maxCoeff(), 1e-300);
    for (Eigen::Index a = 0; a < m; ++a)
      diag(a) = std::max(diag(a), 1e-12 * dmax);

    bool accepted = false;
    while (!accepted && lambda < 1e16) {
      Eigen::MatrixXd A = jtj;
      A.diagonal() += lambda * diag;
      const Eigen::VectorXd delta = A.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Params trial = p;
      for (Eigen::Index a = 0; a < m; ++a)
        trial[static_cast<std::size_t>(pr.active[static_cast<std::size_t>(a)])] += delta(a);
      project(trial, pr.bounds);
      const double c = cost(pr, trial);
      if (std::isfinite(c) && c < current) {
        const double decrease = current - c;
        double step = 0.0;
        double size = 0.0;
        for (int idx : pr.active) {
          step += (trial[idx] - p[idx]) * (trial[idx] - p[idx]);
          size += p[idx] * p[idx];
        }
        p = trial;
        const double previous = current;
        linearize(pr, p, r, J);
        current = r.squaredNorm();
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (decrease <= cfg.rel_tolerance * previous ||
            std::sqrt(step) <= cfg.rel_tolerance * (std::sqrt(size) + cfg.rel_tolerance))
          out.converged = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) {
      // No descent direction left at machine precision: this is a minimum.
      out.converged = true;
      break;
    }
    if (out.converged)
      break;
  }
  out.p = p;
  out.cost = current;
  out.jtj = J.transpose() * J;
  return out;
}

double wrap_phase(double phi) {
  phi = std::remainder(phi, 2.0 * kPi);
  return phi <= -kPi ? phi + 2.0 * kPi : phi;
}

struct Candidate {
  double omega;
  double power;
  std::complex<double> spectrum;
};

struct Spectrum {
  std::vector<double> omega;
  std::vector<double> power;
  std::vector<std::complex<double>> value;
  double nyquist = 0.0;
  double span = 0.0;
};

Spectrum compute_periodogram(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  double mean = 0.0;
  for (double v : y)
    mean += v;
  mean /= static_cast<double>(n);
  Spectrum s;
  s.span = t.back() - t.front();
  const double spacing = s.span / static_cast<double>(n - 1);
  s.nyquist = kPi / spacing;
  // Zero padding by 4 corresponds to a frequency step of 2 pi / (4 n spacing).
  const double step = 2.0 * kPi / (4.0 * static_cast<double>(n) * spacing);
  const auto bins = static_cast<std::size_t>(std::floor(s.nyquist / step + 1e-9)) + 1;
  s.omega.resize(bins);
  s.power.resize(bins);
  s.value.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double w = static_cast<double>(b) * step;
    std::complex<double> acc{};
    for (std::size_t k = 0; k < n; ++k)
      acc += (y[k] - mean) * std::polar(1.0, -w * (t[k] - t.front()));
    s.omega[b] = w;
    s.value[b] = acc;
    s.power[b] = std::norm(acc);
  }
  return s;
}

/// Parabolic interpolation around bin b.
double refine_peak(const Spectrum &s, std::size_t b) {
  if (b == 0 || b + 1 >= s.power.size())
    return s.omega[b];
  const double l = s.power[b - 1];
  const double c = s.power[b];
  const double r = s.power[b + 1];
  const double denom = l - 2.0 * c + r;
  if (!(denom < 0.0))
    return s.omega[b];
  const double shift = std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
  return s.omega[b] + shift * (s.omega[1] - s.omega[0]);
}

/// Local maxima sorted by descending power, ties toward lower frequency.
std::vector<std::size_t> peak_bins(const Spectrum &s) {
  std::vector<std::size_t> peaks;
  for (std::size_t b = 1; b < s.power.size(); ++b) {
    const bool left = s.power[b] > s.power[b - 1];
    const bool right = b + 1 == s.power.size() || s.power[b] >= s.power[b + 1];
    if (left && right)
      peaks.push_back(b);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return s.power[a] > s.power[b]; });
  return peaks;
}

double median(std::vector<double> v) {
  if (v.empty())
    return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1)
    return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

void check_trace(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size())
    throw DomainError("trace time and value arrays differ in length");
  if (t.size() < 8)
    throw DomainError("trace needs at least 8 samples");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || !std::isfinite(y[k]))
      throw DomainError("trace contains non-finite values");
    if (k > 0 && !(t[k] > t[k - 1]))
      throw DomainError("trace times must be strictly increasing");
  }
}

// Flat up to rounding: what is left after removing the mean is arithmetic noise, not signal.
bool is_constant(std::span<const double> y) {
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return *hi - *lo <= 1e-12 * std::max(std::abs(*lo), std::abs(*hi));
}

FrequencySeed seed_from(const Spectrum &s, std::size_t bin, std::size_t n, double snr) {
  FrequencySeed f;
  f.omega = refine_peak(s, bin);
  f.amplitude = 2.0 * std::abs(s.value[bin]) / static_cast<double>(n);
  f.phase = std::arg(s.value[bin]);
  f.snr = snr;
  return f;
}

} // namespace

void FitConfig::validate() const {
  if (max_iterations < 1)
    throw DomainError("max_iterations must be >= 1");
  if (!(rel_tolerance > 0.0))
    throw DomainError("rel_tolerance must be positive");
  if (omega_bounds && !(omega_bounds->first > 0.0 && omega_bounds->second > omega_bounds->first))
    throw DomainError("omega bounds must be positive and ordered");
  if (!(min_contrast_snr >= 0.0))
    throw DomainError("min_contrast_snr must be >= 0");
}

double RabiFitResult::evaluate(double t_ns) const {
  const double env = amp_fast * std::exp(-t_ns / tau_fast_ns) +
                     amp_slow * std::exp(-t_ns / tau_slow_ns);
  return offset - env * (baseline + std::sin(omega * t_ns + phase));
}

FrequencySeed periodogram_seed(std::span<const double> t_ns, std::span<const double> y) {
  check_trace(t_ns, y);
  if (is_constant(y))
    return {};
  const Spectrum s = compute_periodogram(t_ns, y);
  const auto peaks = peak_bins(s);
  const double med = median(s.power);
  if (peaks.empty() || s.power[peaks.front()] <= 0.0)
    return {};
  const double peak = s.power[peaks.front()];
  const double snr = med > 0.0 ? peak / med : std::numeric_limits<double>::infinity();
  return seed_from(s, peaks.front(), t_ns.size(), snr);
}

FitOutcome try_fit_pixel(std::span<const double> t_ns, std::span<const double> y,
                         const FitConfig &cfg) {
  cfg.validate();
  check_trace(t_ns, y);
  FitOutcome out;
  if (is_constant(y)) {
    out.message = "trace is constant";
    return out;
  }
  const Spectrum spectrum = compute_periodogram(t_ns, y);
  const auto peaks = peak_bins(spectrum);
  const double med = median(spectrum.power);
  if (peaks.empty() || !(spectrum.power[peaks.front()] > 0.0)) {
    out.message = "trace has no oscillating component";
    return out;
  }
  const double peak_power = spectrum.power[peaks.front()];
  out.seed_snr = med > 0.0 ? peak_power / med : std::numeric_limits<double>::infinity();
  if (out.seed_snr < cfg.min_contrast_snr) {
    out.message = "periodogram SNR " + std::to_string(out.seed_snr) + " below threshold";
    return out;
  }

  const double span = spectrum.span;
  Bounds bounds{};
  if (cfg.omega_bounds) {
    bounds.omega_lo = cfg.omega_bounds->first;
    bounds.omega_hi = cfg.omega_bounds->second;
  } else {
    bounds.omega_lo = 2.0 * kPi * 1e-4;  // 0.1 MHz
    bounds.omega_hi = spectrum.nyquist;
  }
  const double min_spacing = span / static_cast<double>(t_ns.size() - 1);
  bounds.log_tau_lo = std::log(min_spacing / 10.0);
  bounds.log_tau_hi = std::log(span * 1e3);

  double mean = 0.0;
  double energy = 0.0;
  for (double v : y) {
    mean += v;
    energy += v * v;
  }
  mean /= static_cast<double>(y.size());

  std::vector<int> base_active{kA, kB, kLogTauF, kOmega};
  if (cfg.allow_phase)
    base_active.push_back(kPhase);
  if (cfg.track_baseline)
    base_active.push_back(kKappa);

  // Single-exponential fits from the strongest periodogram peaks; the best cost wins.
  LmResult best;
  best.cost = std::numeric_limits<double>::infinity();
  const std::size_t n_starts = std::min<std::size_t>(3, peaks.size());
  for (std::size_t c = 0; c < n_starts; ++c) {
    const FrequencySeed seed = seed_from(spectrum, peaks[c], t_ns.size(), out.seed_snr);
    Params p{};
    p[kA] = mean;
    p[kOmega] = seed.omega;
    // -E sin(w t + phi) = E cos(w t + phi + pi/2) matches a cos(w t + psi) with psi = arg(Y).
    if (cfg.allow_phase) {
      p[kB] = seed.amplitude;
      p[kPhase] = seed.phase - kPi / 2.0;
    } else {
      p[kB] = seed.amplitude * std::sin(seed.phase);
      p[kPhase] = 0.0;
    }
    p[kLogTauF] = std::log(span);
    p[kLogTauS] = std::log(span);
    const Problem pr{t_ns, y, base_active, bounds};
    LmResult r = levenberg_marquardt(pr, p, cfg, energy);
    if (r.cost < best.cost)
      best = std::move(r);
  }

  LmResult chosen = best;
  EnvelopeMode mode = EnvelopeMode::SingleExp;
  if (cfg.envelope_mode == EnvelopeMode::DoubleExp) {
    Params p = best.p;
    const double tau = std::exp(best.p[kLogTauF]);
    p[kB] = best.p[kB] / 2.0;
    p[kC] = best.p[kB] / 2.0;
    p[kLogTauF] = std::log(tau / 3.0);
    p[kLogTauS] = std::log(tau * 3.0);
    std::vector<int> active = base_active;
    active.push_back(kC);
    active.push_back(kLogTauS);
    const Problem pr{t_ns, y, active, bounds};
    LmResult dbl = levenberg_marquardt(pr, p, cfg, energy);

    if (dbl.p[kLogTauF] > dbl.p[kLogTauS]) {
      std::swap(dbl.p[kLogTauF], dbl.p[kLogTauS]);
      std::swap(dbl.p[kB], dbl.p[kC]);
    }
    // Degeneracy: time constants too close, or an amplitude consistent with zero.
    bool degenerate = std::exp(dbl.p[kLogTauF] - dbl.p[kLogTauS]) > 0.8 || !(dbl.cost < best.cost);
    if (!degenerate) {
      const auto dof = static_cast<double>(t_ns.size()) - static_cast<double>(active.size());
      const double s2 = dof > 0.0 ? dbl.cost / dof : 0.0;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(dbl.jtj);
      if (!lu.isInvertible()) {
        degenerate = true;
      } else if (s2 > 0.0) {
        const Eigen::MatrixXd cov = lu.inverse() * s2;
        for (std::size_t a = 0; a < active.size(); ++a) {
          const int idx = active[a];
          if (idx != kB && idx != kC)
            continue;
          const double sigma = std::sqrt(std::max(0.0, cov(static_cast<Eigen::Index>(a),
                                                           static_cast<Eigen::Index>(a))));
          if (!(std::abs(dbl.p[idx]) > 2.0 * sigma))
            degenerate = true;
        }
      }
    }
    if (!degenerate) {
      chosen = std::move(dbl);
      mode = EnvelopeMode::DoubleExp;
    }
  }

  const Params &p = chosen.p;
  RabiFitResult res;
  res.offset = p[kA];
  res.omega = p[kOmega];
  res.phase = wrap_phase(p[kPhase]);
  res.baseline = p[kKappa];
  res.envelope = mode;
  res.iterations = chosen.iterations;
  if (mode == EnvelopeMode::DoubleExp) {
    res.amp_fast = p[kB];
    res.amp_slow = p[kC];
    res.tau_fast_ns = std::exp(p[kLogTauF]);
    res.tau_slow_ns = std::exp(p[kLogTauS]);
  } else {
    res.amp_fast = p[kB];
    res.amp_slow = 0.0;
    res.tau_fast_ns = std::exp(p[kLogTauF]);
    res.tau_slow_ns = res.tau_fast_ns;
  }
  res.residual_rms = std::sqrt(chosen.cost / static_cast<double>(t_ns.size()));
  const bool at_bound = std::abs(res.omega - bounds.omega_lo) <= 1e-9 * bounds.omega_lo ||
                        std::abs(res.omega - bounds.omega_hi) <= 1e-9 * bounds.omega_hi;
  res.converged = chosen.converged && !at_bound;
  out.result = res;
  out.status = res.converged ? FitStatus::Converged : FitStatus::NotConverged;
  if (!res.converged)
    out.message = at_bound ? "Rabi frequency ended on a bound" : "iteration limit reached";
  return out;
}

RabiFitResult fit_pixel(std::span<const double> t_ns, std::span<const double> y,
                        const FitConfig &cfg) {
  auto outcome = try_fit_pixel(t_ns, y, cfg);
  switch (outcome.status) {
  case FitStatus::BelowThreshold:
    throw NoOscillation(outcome.message);
  case FitStatus::NotConverged:
    throw NotConverged(outcome.message);
  case FitStatus::Converged:
    break;
  }
  return outcome.result;
}

CubeFitSummary CubeFit::summary() const {
  CubeFitSummary s;
  s.pixels = status.size();
  std::vector<double> residuals;
  for (std::size_t k = 0; k < status.size(); ++k) {
    switch (status[k]) {
    case FitStatus::Converged:
      ++s.converged;
      residuals.push_back(params[k].residual_rms);
      break;
    case FitStatus::NotConverged:
      ++s.not_converged;
      residuals.push_back(params[k].residual_rms);
      break;
    case FitStatus::BelowThreshold:
      ++s.below_threshold;
      break;
    }
  }
  s.converged_fraction = s.pixels ? static_cast<double>(s.converged) / static_cast<double>(s.pixels) : 0.0;
  s.median_residual = median(std::move(residuals));
  return s;
}

CubeFit fit_cube(const ImageCube &cube, const FitConfig &cfg, PolarizationComponent component,
                 double gamma_hz_per_t, unsigned threads) {
  cube.validate();
  cfg.validate();
  const std::size_t n = cube.grid.size();
  CubeFit out;
  out.field = {cube.grid, component, std::vector<double>(n, 0.0)};
  out.params.resize(n);
  out.status.resize(n, FitStatus::BelowThreshold);
  parallel_for(n, resolve_threads(threads), [&](std::size_t k) {
    const auto trace = cube.trace(k);
    const auto fit = try_fit_pixel(cube.dt_ns, trace, cfg);
    out.status[k] = fit.status;
    out.params[k] = fit.result;
    if (fit.status != FitStatus::BelowThreshold)
      out.field.values[k] = field_from_omega(std::abs(fit.result.omega), gamma_hz_per_t);
  });
  return out;
}

} // namespace nvscope::analysis
