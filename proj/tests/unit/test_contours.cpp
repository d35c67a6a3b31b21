#include <doctest.h>

#include <cmath>

#include "nvscope/acquisition.hpp"
#include "nvscope/analysis/contours.hpp"
#include "nvscope/errors.hpp"

using namespace nvscope;
using namespace nvscope::analysis;

namespace {

struct RadialImage {
  int n = 121;
  double cx = 60.3, cy = 60.7;
  std::vector<double> pixels;
};

/// Contrast image of b(r) = b_ref r_ref / r (or b_ref r / r_ref when `rising`), r in pixels.
RadialImage radial_image(double dt_ns, double b_ref, double r_ref, bool rising = false,
                         const DecayParams &decay = DecayParams::none()) {
  RadialImage img;
  for (int j = 0; j < img.n; ++j)
    for (int i = 0; i < img.n; ++i) {
      const double r = std::hypot(i - img.cx, j - img.cy);
      const double b = rising ? b_ref * r / r_ref : b_ref * r_ref / r;
      img.pixels.push_back(contrast_at(b, dt_ns, decay, 0.05));
    }
  return img;
}

std::vector<const IsoBRidge *> ridges_of(const IsoBContourSet &set, int m) {
  std::vector<const IsoBRidge *> out;
  for (const auto &r : set.ridges)
    if (r.m == m)
      out.push_back(&r);
  return out;
}

} // namespace

TEST_CASE("contour labels: first order at 30 ns") {
  const double b1 = contour_label(1, 30.0);
  CHECK(b1 == doctest::Approx(1.0 / (2 * 2.8e10 * 30e-9)).epsilon(1e-14));
  CHECK(b1 * 1e6 == doctest::Approx(595.2).epsilon(1e-3));
  for (int m = 1; m < 20; ++m) {
    CHECK(contour_label(m, 60.0) == doctest::Approx(contour_label(m, 30.0) / 2).epsilon(1e-15));
    CHECK(contour_label(m + 1, 30.0) > contour_label(m, 30.0));
  }
  CHECK_THROWS_AS(contour_label(0, 30.0), DomainError);
  CHECK_THROWS_AS(contour_label(1, 0.0), DomainError);
}

TEST_CASE("contours: empty and featureless frames") {
  const std::vector<double> zero(50 * 40, 0.0);
  CHECK(extract_contours(zero, 50, 40, 30.0).ridges.empty());
  const std::vector<double> flat(50 * 40, 0.02);
  CHECK(extract_contours(flat, 50, 40, 30.0).ridges.empty());
  CHECK_THROWS_AS(extract_contours(zero, 49, 40, 30.0), DomainError);
}

TEST_CASE("contours: radial field rings sit at the analytic radii") {
  const double dt = 30.0;
  const double b1 = contour_label(1, dt);
  const double r1 = 40.0;
  for (const auto &decay : {DecayParams::none(), DecayParams{}}) {
    const auto img = radial_image(dt, b1, r1, false, decay);
    const auto set = extract_contours(img.pixels, img.n, img.n, dt);
    CHECK(set.order_step == 2);
    CHECK(set.dt_mw_ns == dt);
    const auto first = ridges_of(set, 1);
    REQUIRE(first.size() == 1);
    CHECK(first[0]->b_label == doctest::Approx(595.2e-6).epsilon(1e-3));
    CHECK(first[0]->points.size() > 100);
    for (const auto &p : first[0]->points)
      CHECK(std::abs(std::hypot(p.i - img.cx, p.j - img.cy) - r1) <= 1.0);

    // Omega dt = 3 pi at r1 / 3.
    const auto third = ridges_of(set, 3);
    REQUIRE(third.size() == 1);
    CHECK(third[0]->b_label == doctest::Approx(3 * b1).epsilon(1e-12));
    for (const auto &p : third[0]->points)
      CHECK(std::abs(std::hypot(p.i - img.cx, p.j - img.cy) - r1 / 3) <= 1.0);

    const auto lv = set.levels();
    for (std::size_t k = 1; k < lv.size(); ++k) {
      CHECK(lv[k].first > lv[k - 1].first);
      CHECK(lv[k].second > lv[k - 1].second);
    }
    CHECK(lv.front().first == 1);
  }
}

TEST_CASE("contours: doubling dt halves the label spacing") {
  const double b1 = contour_label(1, 30.0);
  const auto img30 = radial_image(30.0, b1, 20.0);
  const auto img60 = radial_image(60.0, b1, 20.0);
  const auto s30 = extract_contours(img30.pixels, img30.n, img30.n, 30.0);
  const auto s60 = extract_contours(img60.pixels, img60.n, img60.n, 60.0);
  const auto l30 = s30.levels(), l60 = s60.levels();
  REQUIRE(l30.size() >= 2);
  REQUIRE(l60.size() >= 2);
  CHECK(l60[1].second - l60[0].second == doctest::Approx((l30[1].second - l30[0].second) / 2));
  // Same field, twice the duration: the m = 1 ring moves out to twice the radius.
  const auto r60 = ridges_of(s60, 1);
  REQUIRE(r60.size() == 1);
  double mean_r = 0.0;
  for (const auto &p : r60[0]->points)
    mean_r += std::hypot(p.i - img60.cx, p.j - img60.cy);
  mean_r /= static_cast<double>(r60[0]->points.size());
  CHECK(mean_r == doctest::Approx(40.0).epsilon(1.0 / 40.0));
}

TEST_CASE("contours: anchor counts outward from a low-field centre") {
  const double dt = 30.0;
  const double b1 = contour_label(1, dt);
  const auto img = radial_image(dt, b1, 15.0, true);
  ContourOptions opts;
  opts.anchor = std::pair{60, 60};
  const auto set = extract_contours(img.pixels, img.n, img.n, dt, opts);
  for (int m : {1, 3}) {
    const auto ring = ridges_of(set, m);
    REQUIRE(ring.size() == 1);
    for (const auto &p : ring[0]->points)
      CHECK(std::abs(std::hypot(p.i - img.cx, p.j - img.cy) - 15.0 * m) <= 1.0);
  }
  opts.anchor = std::pair{121, 0};
  CHECK_THROWS_AS(extract_contours(img.pixels, img.n, img.n, dt, opts), DomainError);
}
