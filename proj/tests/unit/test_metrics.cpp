#include <doctest.h>

#include <cmath>
#include <iomanip>

#include "nvscope/analysis/metrics.hpp"
#include "nvscope/errors.hpp"
#include "test_support.hpp"

using namespace nvscope;
using namespace nvscope::analysis;
using testsupport::Gen;

namespace {

PolarizedFieldMap uniform_map(double b, int n) {
  GridSpec g;
  g.nx = n;
  g.ny = n;
  g.pitch = 1e-6;
  return {g, PolarizationComponent::SigmaMinus, std::vector<double>(g.size(), b)};
}

std::vector<ImageCube> repeats(double counts_ref, std::optional<std::uint64_t> base_seed,
                               int n = 10) {
  const auto bmap = uniform_map(100e-6, 8);
  const auto scan = linear_scan(0.0, 2000.0, 100);
  PulseParams pulse;
  pulse.counts_ref = counts_ref;
  DecayParams decay;
  decay.weight_fast = 0.0;
  std::vector<ImageCube> out;
  for (int k = 0; k < n; ++k) {
    std::optional<std::uint64_t> seed;
    if (base_seed)
      seed = *base_seed + static_cast<std::uint64_t>(k);
    out.push_back(simulate_cube(bmap, scan, pulse, decay, seed));
  }
  return out;
}

/// Fixed envelope model matching the simulated decay, so the estimator does not change with counts.
FitConfig single_exp() {
  FitConfig cfg;
  cfg.envelope_mode = EnvelopeMode::SingleExp;
  return cfg;
}

} // namespace

TEST_CASE("dynamic range") {
  CHECK(dynamic_range_db(3e-6, 3e-6) == 0.0);
  CHECK(dynamic_range_db(1e-6, 1e-5) == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(std::abs(dynamic_range_db(1e-6, 251.2e-6) - 48.0) < 0.01);
  CHECK_THROWS_AS(dynamic_range_db(2e-6, 1e-6), DomainError);
  CHECK_THROWS_AS(dynamic_range_db(0.0, 1e-6), DomainError);
  CHECK_THROWS_AS(dynamic_range_db(-1e-6, 1e-6), DomainError);
}

TEST_CASE("property: dynamic range is additive in dB") {
  Gen g(4848);
  for (int k = 0; k < 200; ++k) {
    const double b = g.log_uniform(1e-9, 1e-2);
    const double r1 = g.log_uniform(1.0, 1e3), r2 = g.log_uniform(1.0, 1e3);
    const double sum = dynamic_range_db(b, b * r1) + dynamic_range_db(b * r1, b * r1 * r2);
    CHECK(std::abs(sum - dynamic_range_db(b, b * r1 * r2)) < 1e-12 * std::max(1.0, std::abs(sum)));
    CHECK(std::abs(dynamic_range_db(b, 10 * b) + dynamic_range_db(10 * b, 100 * b) -
                   dynamic_range_db(b, 100 * b)) < 1e-12);
  }
}

TEST_CASE("insertion loss of a 50 mA drive into 50 ohm") {
  const auto r = insertion_loss_db(22.6, 0.05, 50.0);
  // 0.125 W = 125 mW.
  CHECK(r.p_sim_dbm == doctest::Approx(10 * std::log10(125.0)).epsilon(1e-14));
  CHECK(std::abs(r.p_sim_dbm - 20.97) < 0.005);
  CHECK(r.loss_db == doctest::Approx(22.6 - r.p_sim_dbm).epsilon(1e-14));
  CHECK(std::abs(r.loss_db - 1.66) < 0.05);
  CHECK(std::abs(r.loss_db - 1.7) < 0.1);

  const double j_1mw = std::sqrt(1e-3 / 50.0);
  CHECK(std::abs(insertion_loss_db(0.0, j_1mw, 50.0).p_sim_dbm) < 1e-12);
  CHECK_THROWS_AS(insertion_loss_db(0.0, 0.0, 50.0), DomainError);
  CHECK_THROWS_AS(insertion_loss_db(0.0, 0.01, -50.0), DomainError);
}

TEST_CASE("measurement time counts reference and data sequences") {
  ImageCube cube;
  cube.dt_ns = {0.0, 100.0, 300.0};
  cube.pulse.n_shots = 1000;
  cube.pulse.laser_ns = 700.0;
  cube.pulse.wait_ns = 1500.0;
  // 2 * 1000 * (3 * 2200 + 400) ns = 14 ms.
  CHECK(cube_measurement_time_s(cube) == doctest::Approx(14e-3).epsilon(1e-14));
  cube.dt_ns.clear();
  CHECK(cube_measurement_time_s(cube) == 0.0);
}

TEST_CASE("sensitivity: noiseless repeats give zero") {
  CHECK(amplitude_sensitivity(repeats(1e5, std::nullopt), FitConfig{}) == 0.0);
}

TEST_CASE("sensitivity: needs ten matching repeats") {
  auto r = repeats(1e5, std::nullopt, 9);
  CHECK_THROWS_AS(amplitude_sensitivity(r, FitConfig{}), DomainError);
  r = repeats(1e5, std::nullopt, 10);
  r.back().dt_ns.back() += 1.0;
  CHECK_THROWS_AS(amplitude_sensitivity(r, FitConfig{}), DomainError);
}

TEST_CASE("sensitivity: shot-noise scaling and pinned value") {
  const double s1 = amplitude_sensitivity(repeats(1e5, 1000), single_exp());
  const double s4 = amplitude_sensitivity(repeats(4e5, 2000), single_exp());
  MESSAGE(std::setprecision(12) << "sensitivity at 1e5 counts: " << s1 << " T/sqrt(Hz), at 4e5: " << s4);
  CHECK(s1 > 0.0);
  CHECK(s1 / s4 == doctest::Approx(2.0).epsilon(0.2));
  // Regression value for this exact seeded scenario.
  CHECK(s1 == doctest::Approx(8.50637975429e-08).epsilon(1e-6));
}

TEST_CASE("sensitivity: independent of thread count") {
  const auto r = repeats(1e5, 77);
  CHECK(amplitude_sensitivity(r, FitConfig{}, PolarizationComponent::SigmaMinus, kGammaNv, 1) ==
        amplitude_sensitivity(r, FitConfig{}, PolarizationComponent::SigmaMinus, kGammaNv, 4));
  CHECK(amplitude_sensitivity(r, single_exp(), PolarizationComponent::SigmaMinus, kGammaNv, 1) ==
        amplitude_sensitivity(r, single_exp(), PolarizationComponent::SigmaMinus, kGammaNv, 3));
}
