#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nvscope/fieldcore.hpp"
#include "test_support.hpp"

using namespace nvscope;
using testsupport::Gen;

namespace {

void check_frame(const NvFrame &f) {
  CHECK(norm(f.axis()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(norm(f.e1()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(norm(f.e2()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(dot(f.axis(), f.e1())) < 1e-12);
  CHECK(std::abs(dot(f.axis(), f.e2())) < 1e-12);
  CHECK(std::abs(dot(f.e1(), f.e2())) < 1e-12);
  CHECK(norm(cross(f.e1(), f.e2()) - f.axis()) < 1e-12);
}

NvFrame random_frame(Gen &g) {
  static const char *planes[] = {"XZ", "YZ", "XY", "ZX", "YX", "ZY"};
  const auto plane = TiltPlane::parse(planes[g.integer(0, 5)]);
  return nv_frame_from_tilt(g.uniform(0.0, 90.0), plane).rotated_transverse(g.uniform(-4.0, 4.0));
}

} // namespace

TEST_CASE("tilt frame: vertical, quarter turn and 29.5 degrees") {
  const auto xz = TiltPlane::parse("XZ");
  const auto f0 = nv_frame_from_tilt(0.0, xz);
  CHECK(f0.axis() == Vec3{0, 0, 1});
  const auto f90 = nv_frame_from_tilt(90.0, xz);
  CHECK(f90.axis() == Vec3{1, 0, 0});
  const auto f = nv_frame_from_tilt(29.5, xz);
  const double t = 29.5 * std::numbers::pi / 180.0;
  CHECK(f.axis().x == doctest::Approx(std::sin(t)).epsilon(1e-15));
  CHECK(f.axis().y == 0.0);
  CHECK(f.axis().z == doctest::Approx(std::cos(t)).epsilon(1e-15));
  CHECK(f.axis().x == doctest::Approx(0.4924).epsilon(1e-4));
  CHECK(f.axis().z == doctest::Approx(0.8704).epsilon(1e-4));
  for (const auto &fr : {f0, f90, f})
    check_frame(fr);
}

TEST_CASE("tilt frame: axis stays in the named plane") {
  const auto yz = TiltPlane::parse("YZ");
  const auto f = nv_frame_from_tilt(40.0, yz);
  CHECK(f.axis().x == 0.0);
  CHECK(f.axis().y > 0.0);
  check_frame(f);
  CHECK(yz.tag() == "YZ");
}

TEST_CASE("tilt frame: rejects bad angles and planes") {
  const auto xz = TiltPlane::parse("XZ");
  CHECK_THROWS_AS(nv_frame_from_tilt(-0.1, xz), DomainError);
  CHECK_THROWS_AS(nv_frame_from_tilt(90.5, xz), DomainError);
  CHECK_THROWS_AS(nv_frame_from_tilt(std::nan(""), xz), DomainError);
  CHECK_THROWS_AS(TiltPlane::parse("XX"), DomainError);
  CHECK_THROWS_AS(TiltPlane::parse("Q"), DomainError);
}

TEST_CASE("from_vectors validates orthonormality") {
  CHECK_NOTHROW(NvFrame::from_vectors({0, 0, 1}, {1, 0, 0}, {0, 1, 0}));
  CHECK_THROWS_AS(NvFrame::from_vectors({0, 0, 1}, {0, 1, 0}, {1, 0, 0}), DomainError);  // left-handed
  CHECK_THROWS_AS(NvFrame::from_vectors({0, 0, 1.001}, {1, 0, 0}, {0, 1, 0}), DomainError);
}

TEST_CASE("decompose: linear, circular and axial fields") {
  const auto f = nv_frame_from_tilt(29.5, TiltPlane::parse("XZ"));
  const double beta = 3.7e-5;
  const auto lin = decompose_polarization(f.e1() * Complex(beta, 0), f);
  CHECK(lin.plus == doctest::Approx(beta / 2).epsilon(1e-14));
  CHECK(lin.minus == doctest::Approx(beta / 2).epsilon(1e-14));
  CHECK(lin.axial < 1e-20);

  const ComplexVec3 circ = f.e1() * Complex(beta, 0) + f.e2() * Complex(0, beta);
  const auto c = decompose_polarization(circ, f);
  CHECK(c.plus == doctest::Approx(beta).epsilon(1e-14));
  CHECK(c.minus < 1e-20);

  const auto ax = decompose_polarization(f.axis() * Complex(beta, 0), f);
  CHECK(ax.plus < 1e-20);
  CHECK(ax.minus < 1e-20);
  CHECK(ax.axial == doctest::Approx(beta).epsilon(1e-14));
}

TEST_CASE("flip_axis swaps circular components") {
  const auto f = nv_frame_from_tilt(29.5, TiltPlane::parse("XZ"));
  const auto g = flip_axis(f);
  check_frame(g);
  const double beta = 2e-5;
  const ComplexVec3 circ = f.e1() * Complex(beta, 0) + f.e2() * Complex(0, beta);
  const auto p = decompose_polarization(circ, g);
  CHECK(p.plus < 1e-20);
  CHECK(p.minus == doctest::Approx(beta).epsilon(1e-14));
  const auto lin = decompose_polarization(f.e1() * Complex(beta, 0), g);
  CHECK(lin.plus == doctest::Approx(beta / 2));
  CHECK(lin.minus == doctest::Approx(beta / 2));
  const auto ff = flip_axis(g);
  CHECK(ff.axis() == f.axis());
  CHECK(ff.e1() == f.e1());
  CHECK(ff.e2() == f.e2());
}

TEST_CASE("bias field for a microwave frequency") {
  const BiasConfig cfg{2.87e9, 2.8e10, 1};
  CHECK(bias_field_for_frequency(2.87e9, Transition::SigmaPlus, cfg) == 0.0);
  CHECK(bias_field_for_frequency(2.87e9, Transition::SigmaMinus, cfg) == 0.0);
  // (2.87 - 2.77) GHz / 28 kHz/uT
  const double expect_minus = (2.87e9 - 2.77e9) / 2.8e10;
  CHECK(bias_field_for_frequency(2.77e9, Transition::SigmaMinus, cfg) == doctest::Approx(expect_minus).epsilon(1e-12));
  CHECK(expect_minus * 1e6 == doctest::Approx(3571.43).epsilon(1e-5));
  const double expect_plus = (2.9674e9 - 2.87e9) / 2.8e10;
  CHECK(bias_field_for_frequency(2.9674e9, Transition::SigmaPlus, cfg) == doctest::Approx(expect_plus).epsilon(1e-12));
  CHECK(expect_plus * 1e6 == doctest::Approx(3478.57).epsilon(1e-5));
}

TEST_CASE("bias field: unreachable transition names the other one") {
  const BiasConfig cfg;
  try {
    bias_field_for_frequency(2.77e9, Transition::SigmaPlus, cfg);
    FAIL("expected a domain error");
  } catch (const DomainError &e) {
    CHECK(std::string(e.what()).find("sigma-") != std::string::npos);
  }
  try {
    bias_field_for_frequency(2.97e9, Transition::SigmaMinus, cfg);
    FAIL("expected a domain error");
  } catch (const DomainError &e) {
    CHECK(std::string(e.what()).find("sigma+") != std::string::npos);
  }
  CHECK_THROWS_AS(bias_field_for_frequency(-1.0, Transition::SigmaMinus, cfg), DomainError);
  CHECK_THROWS_AS(bias_field_for_frequency(2.8e9, Transition::SigmaMinus, BiasConfig{2.87e9, 0.0, 1}), DomainError);
}

TEST_CASE("transition tags round-trip") {
  CHECK(parse_transition(to_string(Transition::SigmaPlus)) == Transition::SigmaPlus);
  CHECK(parse_transition(to_string(Transition::SigmaMinus)) == Transition::SigmaMinus);
  CHECK_THROWS_AS(parse_transition("pi"), DomainError);
}

TEST_CASE("layer average: thin, constant and linear integrands") {
  SensingLayer thin{12e-6, 0.0, 15};
  CHECK(layer_average([](double, double, double z) { return z * z; }, thin, 0, 0) == doctest::Approx(144e-12).epsilon(1e-14));
  SensingLayer l{12e-6, 14e-6, 15};
  CHECK(layer_average([](double, double, double) { return 3.25; }, l, 0, 0) == doctest::Approx(3.25).epsilon(1e-15));
  CHECK(layer_average([](double, double, double z) { return z; }, l, 0, 0) == doctest::Approx(12e-6).epsilon(1e-14));
  const auto h = l.sample_heights();
  CHECK(h.size() == 15);
  CHECK(h.front() == doctest::Approx(12e-6 - 7e-6 + 14e-6 / 30).epsilon(1e-12));
}

TEST_CASE("layer average: invalid layers") {
  CHECK_THROWS_AS((SensingLayer{5e-6, 14e-6, 15}.validate()), DomainError);  // dips below the device plane
  CHECK_THROWS_AS((SensingLayer{12e-6, -1e-6, 15}.validate()), DomainError);
  CHECK_THROWS_AS((SensingLayer{12e-6, 14e-6, 0}.validate()), DomainError);
}

TEST_CASE("layer average converges at second order") {
  // Midpoint rule on z^2: error = d^2 / (12 n^2) exactly.
  const double h = 12e-6, d = 14e-6;
  const double exact = h * h + d * d / 12.0;
  for (int n : {2, 4, 8, 16, 32}) {
    const SensingLayer a{h, d, n}, b{h, d, 2 * n};
    const auto f = [](double, double, double z) { return z * z; };
    const double ea = std::abs(layer_average(f, a, 0, 0) - exact);
    const double eb = std::abs(layer_average(f, b, 0, 0) - exact);
    const double ratio = ea / eb;
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
    CHECK(ratio == doctest::Approx(4.0).epsilon(1e-3));
  }
}

TEST_CASE("property: transverse/axial split is complete") {
  Gen g(101);
  for (int k = 0; k < 250; ++k) {
    const auto f = random_frame(g);
    const ComplexVec3 b = g.cvec(g.log_uniform(1e-9, 1e-2));
    const Complex u = project(b, f.e1()), v = project(b, f.e2()), a = project(b, f.axis());
    const double total = std::norm(u) + std::norm(v) + std::norm(a);
    CHECK(total == doctest::Approx(norm_squared(b)).epsilon(1e-12));
  }
}

TEST_CASE("property: circular components match brute-force complex evaluation") {
  Gen g(202);
  for (int k = 0; k < 250; ++k) {
    const auto f = random_frame(g);
    const ComplexVec3 b = g.cvec(1e-4);
    // Component-wise complex arithmetic, independent of the library projection.
    Complex u{}, v{};
    const Complex bc[3] = {b.x, b.y, b.z};
    const double e1[3] = {f.e1().x, f.e1().y, f.e1().z};
    const double e2[3] = {f.e2().x, f.e2().y, f.e2().z};
    for (int c = 0; c < 3; ++c) {
      u += bc[c] * e1[c];
      v += bc[c] * e2[c];
    }
    const Complex I(0, 1);
    const double plus = std::abs(u - I * v) / 2, minus = std::abs(u + I * v) / 2;
    const auto p = decompose_polarization(b, f);
    CHECK(p.plus == doctest::Approx(plus).epsilon(1e-12));
    CHECK(p.minus == doctest::Approx(minus).epsilon(1e-12));
    CHECK(p.plus + p.minus >= std::max(std::abs(u), std::abs(v)) * (1 - 1e-12));
    CHECK(2 * (p.plus * p.plus + p.minus * p.minus) == doctest::Approx(std::norm(u) + std::norm(v)).epsilon(1e-12));
  }
}

TEST_CASE("property: flip_axis is an involution that swaps components exactly") {
  Gen g(303);
  for (int k = 0; k < 250; ++k) {
    const auto f = random_frame(g);
    const auto b = g.cvec(1e-3);
    const auto p = decompose_polarization(b, f);
    const auto q = decompose_polarization(b, flip_axis(f));
    CHECK(q.plus == p.minus);
    CHECK(q.minus == p.plus);
    CHECK(q.axial == p.axial);
    const auto r = decompose_polarization(b, flip_axis(flip_axis(f)));
    CHECK(r.plus == p.plus);
    CHECK(r.minus == p.minus);
  }
}

TEST_CASE("property: decomposition is invariant under transverse rotation") {
  Gen g(404);
  for (int k = 0; k < 250; ++k) {
    const auto f = random_frame(g);
    const auto b = g.cvec(1e-3);
    const auto p = decompose_polarization(b, f);
    const auto rot = f.rotated_transverse(g.uniform(-10.0, 10.0));
    const auto q = decompose_polarization(b, rot);
    const double scale = norm(b);
    CHECK(std::abs(q.plus - p.plus) <= 1e-12 * scale);
    CHECK(std::abs(q.minus - p.minus) <= 1e-12 * scale);
    CHECK(std::abs(q.axial - p.axial) <= 1e-12 * scale);
  }
}
