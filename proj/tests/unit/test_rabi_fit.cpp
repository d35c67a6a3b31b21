#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nvscope/acquisition.hpp"
#include "nvscope/analysis/rabi_fit.hpp"
#include "nvscope/errors.hpp"
#include "test_support.hpp"

using namespace nvscope;
using namespace nvscope::analysis;
using testsupport::Gen;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double field_for_mhz(double f_mhz) { return f_mhz * 1e6 / kGammaNv; }

std::vector<double> generator_trace(double b, std::span<const double> dt, const DecayParams &d = {},
                                    double c0 = 0.05) {
  std::vector<double> y;
  for (double t : dt)
    y.push_back(contrast_at(b, t, d, c0));
  return y;
}

PolarizedFieldMap map_of(std::vector<double> values, int nx) {
  GridSpec g;
  g.nx = nx;
  g.ny = static_cast<int>(values.size()) / nx;
  return {g, PolarizationComponent::SigmaMinus, std::move(values)};
}

} // namespace

TEST_CASE("fit: 5 MHz over 100 points and 2 us") {
  const auto dt = linear_scan(0, 2000, 100);
  const auto y = generator_trace(field_for_mhz(5.0), dt);
  const auto r = fit_pixel(dt, y, FitConfig{});
  CHECK(r.converged);
  CHECK(r.omega == doctest::Approx(kTwoPi * 5e-3).epsilon(1e-3));
  CHECK(r.tau_fast_ns <= r.tau_slow_ns);
  CHECK(r.residual_rms >= 0.0);
  CHECK(r.residual_rms < 1e-6);
  for (std::size_t k = 0; k < dt.size(); ++k)
    CHECK(r.evaluate(dt[k]) == doctest::Approx(y[k]).epsilon(1e-4));
}

TEST_CASE("fit: constant and empty-ish traces") {
  const auto dt = linear_scan(0, 2000, 100);
  const std::vector<double> flat(100, 0.013);
  CHECK_THROWS_AS(fit_pixel(dt, flat, FitConfig{}), NoOscillation);
  const auto outcome = try_fit_pixel(dt, flat, FitConfig{});
  CHECK(outcome.status == FitStatus::BelowThreshold);
  const std::vector<double> short_t{0, 1, 2, 3}, short_y{0, 1, 0, 1};
  CHECK_THROWS_AS(fit_pixel(short_t, short_y, FitConfig{}), DomainError);
  std::vector<double> bad_t = dt;
  std::swap(bad_t[3], bad_t[4]);
  CHECK_THROWS_AS(fit_pixel(bad_t, flat, FitConfig{}), DomainError);
}

TEST_CASE("fit: 2.8 MHz calibrates to 100 uT") {
  CHECK(field_from_omega(kTwoPi * 2.8e-3) == doctest::Approx(100e-6).epsilon(1e-14));
  const auto dt = linear_scan(0, 2000, 100);
  const auto r = fit_pixel(dt, generator_trace(100e-6, dt), FitConfig{});
  CHECK(field_from_omega(r.omega) == doctest::Approx(100e-6).epsilon(1e-3));
}

TEST_CASE("fit: printed model is recovered exactly without phase or baseline") {
  const auto dt = linear_scan(0, 2000, 100);
  std::vector<double> y;
  const double w = kTwoPi * 3.1e-3;
  for (double t : dt)
    y.push_back(0.02 - (0.01 * std::exp(-t / 400.0) + 0.008 * std::exp(-t / 2500.0)) * std::sin(w * t));
  FitConfig cfg;
  cfg.allow_phase = false;
  cfg.track_baseline = false;
  const auto r = fit_pixel(dt, y, cfg);
  CHECK(r.omega == doctest::Approx(w).epsilon(1e-6));
  CHECK(r.phase == 0.0);
  CHECK(r.baseline == 0.0);
  CHECK(r.offset == doctest::Approx(0.02).epsilon(1e-6));
}

TEST_CASE("fit: single-exponential mode pins the slow amplitude") {
  const auto dt = linear_scan(0, 2000, 100);
  FitConfig cfg;
  cfg.envelope_mode = EnvelopeMode::SingleExp;
  const auto r = fit_pixel(dt, generator_trace(field_for_mhz(4.0), dt, DecayParams{800, 800, 1.0}), cfg);
  CHECK(r.envelope == EnvelopeMode::SingleExp);
  CHECK(r.amp_slow == 0.0);
  CHECK(r.omega == doctest::Approx(kTwoPi * 4e-3).epsilon(1e-6));
}

TEST_CASE("fit: configuration validation and bound handling") {
  FitConfig cfg;
  cfg.omega_bounds = std::pair{0.2, 0.1};
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = FitConfig{};
  cfg.rel_tolerance = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = FitConfig{};
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);

  // A bound window that excludes the true frequency leaves the fit on the bound.
  const auto dt = linear_scan(0, 2000, 100);
  cfg = FitConfig{};
  cfg.omega_bounds = std::pair{kTwoPi * 1e-3, kTwoPi * 2e-3};
  const auto outcome = try_fit_pixel(dt, generator_trace(field_for_mhz(6.0), dt), cfg);
  CHECK(outcome.status == FitStatus::NotConverged);
  CHECK_THROWS_AS(fit_pixel(dt, generator_trace(field_for_mhz(6.0), dt), cfg), NotConverged);
}

TEST_CASE("periodogram seed lands near the oscillation") {
  const auto dt = linear_scan(0, 2000, 100);
  const auto seed = periodogram_seed(dt, generator_trace(field_for_mhz(7.0), dt, DecayParams::none()));
  CHECK(seed.omega == doctest::Approx(kTwoPi * 7e-3).epsilon(0.02));
  CHECK(seed.snr > 30.0);
  CHECK(seed.amplitude > 0.0);
}

TEST_CASE("periodogram: equal peaks resolve to the lower frequency") {
  // Two equal cosines on exact padded-grid bins: f = 4/(4 N T) and 12/(4 N T) cycles per ns.
  const int n = 64;
  std::vector<double> t(n), y(n);
  for (int k = 0; k < n; ++k) {
    t[k] = 10.0 * k;
    y[k] = std::cos(kTwoPi * 4.0 / (n * 10.0) * t[k]) + std::cos(kTwoPi * 12.0 / (n * 10.0) * t[k]);
  }
  const auto seed = periodogram_seed(t, y);
  CHECK(seed.omega == doctest::Approx(kTwoPi * 4.0 / (n * 10.0)).epsilon(0.01));
}

TEST_CASE("cube fit: uniform 100 uT map") {
  const auto bmap = map_of(std::vector<double>(12, 100e-6), 4);
  const auto dt = linear_scan(0, 2000, 100);
  const auto clean = simulate_cube(bmap, dt, PulseParams{}, DecayParams{}, std::nullopt);
  const auto fit = fit_cube(clean, FitConfig{}, PolarizationComponent::SigmaMinus, kGammaNv, 1);
  for (double v : fit.field.values)
    CHECK(v == doctest::Approx(100e-6).epsilon(1e-3));
  CHECK(fit.summary().converged == 12);
  CHECK(fit.summary().converged_fraction == 1.0);

  PulseParams bright;
  bright.counts_ref = 1e5;
  const auto noisy = simulate_cube(bmap, dt, bright, DecayParams{}, 42);
  const auto nfit = fit_cube(noisy, FitConfig{}, PolarizationComponent::SigmaMinus, kGammaNv, 1);
  for (std::size_t k = 0; k < 12; ++k) {
    CHECK(nfit.status[k] == FitStatus::Converged);
    CHECK(nfit.field.values[k] == doctest::Approx(100e-6).epsilon(0.03));
  }
}

TEST_CASE("cube fit: microwave off flags every pixel below threshold") {
  const auto bmap = map_of(std::vector<double>(20, 0.0), 5);
  const auto dt = linear_scan(0, 2000, 100);
  const auto cube = simulate_cube(bmap, dt, PulseParams{}, DecayParams{}, 7);
  const auto fit = fit_cube(cube, FitConfig{}, PolarizationComponent::SigmaMinus, kGammaNv, 1);
  const auto s = fit.summary();
  CHECK(s.below_threshold == 20);
  CHECK(s.converged == 0);
  for (double v : fit.field.values)
    CHECK(v == 0.0);
}

TEST_CASE("cube fit: results are independent of the worker count") {
  Gen g(31);
  std::vector<double> b;
  for (int k = 0; k < 24; ++k)
    b.push_back(g.uniform(30e-6, 400e-6));
  const auto cube = simulate_cube(map_of(b, 6), linear_scan(0, 2000, 100), PulseParams{},
                                  DecayParams{}, 5);
  const auto a = fit_cube(cube, FitConfig{}, PolarizationComponent::SigmaMinus, kGammaNv, 1);
  const auto c = fit_cube(cube, FitConfig{}, PolarizationComponent::SigmaMinus, kGammaNv, 3);
  CHECK(a.field.values == c.field.values);
  CHECK(a.status == c.status);
}

TEST_CASE("property: fitted omega is consistent across 0.5 to 50 MHz") {
  // 100 samples spanning four Rabi periods keep every frequency below the sampling Nyquist.
  const DecayParams decay;
  for (int k = 0; k < 20; ++k) {
    const double f_mhz = 0.5 * std::pow(100.0, k / 19.0);
    const double period_ns = 1e3 / f_mhz;
    const auto dt = linear_scan(0, 4 * period_ns, 100);
    const auto r = fit_pixel(dt, generator_trace(field_for_mhz(f_mhz), dt, decay), FitConfig{});
    CAPTURE(f_mhz);
    CHECK(r.converged);
    CHECK(r.omega == doctest::Approx(kTwoPi * f_mhz * 1e-3).epsilon(1e-3));
  }
}

TEST_CASE("property: fitted omega on the fixed 2 us scan") {
  // Fixed 100-point, 2 us scan: Nyquist is 24.75 MHz, so frequencies stay below it.
  Gen g(1616);
  const auto dt = linear_scan(0, 2000, 100);
  for (int k = 0; k < 60; ++k) {
    const double f_mhz = g.log_uniform(0.5, 20.0);
    const DecayParams decay{g.uniform(200, 800), g.uniform(1000, 6000), g.uniform(0.1, 0.9)};
    const auto r = fit_pixel(dt, generator_trace(field_for_mhz(f_mhz), dt, decay, g.uniform(0.01, 0.3)),
                             FitConfig{});
    CAPTURE(f_mhz);
    CHECK(r.omega == doctest::Approx(kTwoPi * f_mhz * 1e-3).epsilon(1e-3));
  }
}

TEST_CASE("property: fitted omega is invariant under trace scaling") {
  Gen g(1717);
  const auto dt = linear_scan(0, 2000, 100);
  for (int k = 0; k < 60; ++k) {
    const double f_mhz = g.log_uniform(0.8, 15.0);
    auto y = generator_trace(field_for_mhz(f_mhz), dt);
    const auto base = fit_pixel(dt, y, FitConfig{});
    const double s = g.log_uniform(0.1, 10.0);
    for (double &v : y)
      v *= s;
    const auto scaled = fit_pixel(dt, y, FitConfig{});
    CAPTURE(f_mhz);
    CAPTURE(s);
    CHECK(scaled.omega == doctest::Approx(base.omega).epsilon(1e-6));
  }
}

TEST_CASE("property: fitted field maps scale linearly with the forward model") {
  Gen g(1818);
  const auto dt = linear_scan(0, 2000, 100);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> b;
    for (int p = 0; p < 6; ++p)
      b.push_back(g.uniform(40e-6, 300e-6));
    const double alpha = g.uniform(0.5, 2.0);
    std::vector<double> scaled = b;
    for (double &v : scaled)
      v *= alpha;
    const auto fa = fit_cube(simulate_cube(map_of(b, 3), dt, PulseParams{}, DecayParams{}, std::nullopt),
                             FitConfig{}, PolarizationComponent::SigmaMinus, kGammaNv, 1);
    const auto fb = fit_cube(simulate_cube(map_of(scaled, 3), dt, PulseParams{}, DecayParams{}, std::nullopt),
                             FitConfig{}, PolarizationComponent::SigmaMinus, kGammaNv, 1);
    for (std::size_t p = 0; p < b.size(); ++p)
      CHECK(fb.field.values[p] == doctest::Approx(alpha * fa.field.values[p]).epsilon(2e-3));
  }
}
