#pragma once

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "nvscope/errors.hpp"
#include "nvscope/vec3.hpp"

namespace nvscope {

// Physical constants and instrument defaults (SI).
inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;  // T m / A
inline constexpr double kGammaNv = 2.8e10;                  // Hz / T  (28 kHz/uT)
inline constexpr double kZeroFieldSplitting = 2.87e9;       // Hz

enum class LabAxis { X, Y, Z };

/// Plane in which the NV axis is tilted: the axis leans from `reference` toward `toward`.
/// "XZ" means tilted away from Z toward X.
struct TiltPlane {
  LabAxis toward = LabAxis::X;
  LabAxis reference = LabAxis::Z;

  static TiltPlane parse(std::string_view tag);
  std::string tag() const;
};

/// Right-handed orthonormal frame (e1, e2, axis) attached to the NV symmetry axis.
/// Only constructible through validated factories.
class NvFrame {
public:
  static constexpr double kTolerance = 1e-12;

  /// Throws DomainError unless the three vectors form a right-handed orthonormal frame.
  static NvFrame from_vectors(const Vec3 &axis, const Vec3 &e1, const Vec3 &e2);

  const Vec3 &axis() const { return axis_; }
  const Vec3 &e1() const { return e1_; }
  const Vec3 &e2() const { return e2_; }

  /// Rotates the transverse pair about the axis by `angle_rad`.
  NvFrame rotated_transverse(double angle_rad) const;

private:
  NvFrame(const Vec3 &axis, const Vec3 &e1, const Vec3 &e2) : axis_(axis), e1_(e1), e2_(e2) {}
  Vec3 axis_;
  Vec3 e1_;
  Vec3 e2_;
};

/// Frame whose axis is tilted `tilt_deg` (0..90) from the plane's reference axis.
NvFrame nv_frame_from_tilt(double tilt_deg, TiltPlane plane);

/// Reverses the axis (and e2, to keep handedness). Swaps the sigma+/- roles.
NvFrame flip_axis(const NvFrame &frame);

struct Polarization {
  double axial = 0.0;  // |b . axis|
  double plus = 0.0;   // |u - i v| / 2
  double minus = 0.0;  // |u + i v| / 2
};

/// Splits a phasor into the axial magnitude and the two circular components about the NV
/// axis, with u = b.e1 and v = b.e2.
Polarization decompose_polarization(const ComplexVec3 &b, const NvFrame &frame);

enum class Transition { SigmaPlus, SigmaMinus };

std::string_view to_string(Transition t);
Transition parse_transition(std::string_view tag);

struct BiasConfig {
  double d_zfs_hz = kZeroFieldSplitting;
  double gamma_hz_per_t = kGammaNv;
  int sign = +1;  // direction of B_dc along the NV axis

  void validate() const;
  /// Transition tuned by a positive bias along the axis for this sign.
  Transition tuned_transition() const {
    return sign >= 0 ? Transition::SigmaPlus : Transition::SigmaMinus;
  }
};

/// |B_dc| that puts the chosen transition at `f_mw_hz`: f = D +/- gamma B.
double bias_field_for_frequency(double f_mw_hz, Transition transition, const BiasConfig &cfg);

/// NV-doped slab at mean height `height` (m) with thickness `thickness` (m).
struct SensingLayer {
  double height = 12e-6;
  double thickness = 14e-6;
  int n_samples = 15;

  void validate() const;
  /// Midpoint-rule sample heights across the slab, in ascending order.
  std::vector<double> sample_heights() const;
};

/// Mean of f(x, y, z) over z in [h - d/2, h + d/2] by n-point midpoint quadrature.
/// Works for any f whose result supports += and *= double (real or vector-valued).
template <class F>
auto layer_average(F &&f, const SensingLayer &layer, double x, double y) {
  layer.validate();
  const auto heights = layer.sample_heights();
  auto acc = f(x, y, heights.front());
  for (std::size_t k = 1; k < heights.size(); ++k)
    acc += f(x, y, heights[k]);
  acc *= 1.0 / static_cast<double>(heights.size());
  return acc;
}

} // namespace nvscope
