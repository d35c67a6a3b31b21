#include "nvscope/fieldcore.hpp"

#include <cmath>
#include <numbers>

namespace nvscope {
namespace {

Vec3 unit(LabAxis a) {
  switch (a) {
  case LabAxis::X:
    return {1, 0, 0};
  case LabAxis::Y:
    return {0, 1, 0};
  case LabAxis::Z:
    break;
  }
  return {0, 0, 1};
}

char letter(LabAxis a) {
  switch (a) {
  case LabAxis::X:
    return 'X';
  case LabAxis::Y:
    return 'Y';
  case LabAxis::Z:
    break;
  }
  return 'Z';
}

LabAxis axis_from_letter(char c, std::string_view tag) {
  switch (c) {
  case 'X':
  case 'x':
    return LabAxis::X;
  case 'Y':
  case 'y':
    return LabAxis::Y;
  case 'Z':
  case 'z':
    return LabAxis::Z;
  default:
    throw DomainError("tilt plane '" + std::string(tag) + "' must name two of X, Y, Z");
  }
}

} // namespace

TiltPlane TiltPlane::parse(std::string_view tag) {
  if (tag.size() != 2)
    throw DomainError("tilt plane '" + std::string(tag) + "' must be two axis letters");
  TiltPlane p{axis_from_letter(tag[0], tag), axis_from_letter(tag[1], tag)};
  if (p.toward == p.reference)
    throw DomainError("tilt plane '" + std::string(tag) + "' names the same axis twice");
  return p;
}

std::string TiltPlane::tag() const { return {letter(toward), letter(reference)}; }

NvFrame NvFrame::from_vectors(const Vec3 &axis, const Vec3 &e1, const Vec3 &e2) {
  const auto off = [](double v, double target) { return std::abs(v - target) > kTolerance; };
  if (!is_finite(axis) || !is_finite(e1) || !is_finite(e2))
    throw DomainError("NV frame has non-finite components");
  if (off(norm(axis), 1) || off(norm(e1), 1) || off(norm(e2), 1))
    throw DomainError("NV frame vectors must be unit length");
  if (off(dot(axis, e1), 0) || off(dot(axis, e2), 0) || off(dot(e1, e2), 0))
    throw DomainError("NV frame vectors must be mutually orthogonal");
  if (norm(cross(e1, e2) - axis) > kTolerance)
    throw DomainError("NV frame must be right-handed (e1 x e2 = axis)");
  return NvFrame(axis, e1, e2);
}

NvFrame NvFrame::rotated_transverse(double angle_rad) const {
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  return NvFrame(axis_, e1_ * c + e2_ * s, e2_ * c - e1_ * s);
}

NvFrame nv_frame_from_tilt(double tilt_deg, TiltPlane plane) {
  if (!(tilt_deg >= 0.0 && tilt_deg <= 90.0))
    throw DomainError("tilt angle must lie in [0, 90] degrees, got " + std::to_string(tilt_deg));
  if (plane.toward == plane.reference)
    throw DomainError("tilt plane must name two distinct axes");
  const double theta = tilt_deg * std::numbers::pi / 180.0;
  const Vec3 t = unit(plane.toward);
  const Vec3 r = unit(plane.reference);
  // Exact values at the end points keep the frame bit-clean for 0 and 90 degrees.
  const double s = tilt_deg == 90.0 ? 1.0 : std::sin(theta);
  const double c = tilt_deg == 90.0 ? 0.0 : std::cos(theta);
  const Vec3 axis = t * s + r * c;
  const Vec3 e1 = t * c - r * s;
  const Vec3 e2 = cross(axis, e1);
  return NvFrame::from_vectors(axis, e1, e2);
}

NvFrame flip_axis(const NvFrame &frame) {
  return NvFrame::from_vectors(-frame.axis(), frame.e1(), -frame.e2());
}

Polarization decompose_polarization(const ComplexVec3 &b, const NvFrame &frame) {
  const Complex u = project(b, frame.e1());
  const Complex v = project(b, frame.e2());
  const Complex iv{-v.imag(), v.real()};
  return {std::abs(project(b, frame.axis())), std::abs(u - iv) / 2.0, std::abs(u + iv) / 2.0};
}

std::string_view to_string(Transition t) {
  return t == Transition::SigmaPlus ? "sigma+" : "sigma-";
}

Transition parse_transition(std::string_view tag) {
  if (tag == "sigma+" || tag == "+" || tag == "plus")
    return Transition::SigmaPlus;
  if (tag == "sigma-" || tag == "-" || tag == "minus")
    return Transition::SigmaMinus;
  throw DomainError("unknown transition '" + std::string(tag) + "' (expected sigma+ or sigma-)");
}

void BiasConfig::validate() const {
  if (!(gamma_hz_per_t > 0.0))
    throw DomainError("gamma_nv must be positive");
  if (!(d_zfs_hz > 0.0))
    throw DomainError("zero-field splitting must be positive");
  if (sign != 1 && sign != -1)
    throw DomainError("bias sign must be +1 or -1");
}

double bias_field_for_frequency(double f_mw_hz, Transition transition, const BiasConfig &cfg) {
  cfg.validate();
  if (!(f_mw_hz > 0.0))
    throw DomainError("microwave frequency must be positive");
  const double detuning = f_mw_hz - cfg.d_zfs_hz;
  if (transition == Transition::SigmaPlus && detuning < 0.0)
    throw DomainError("sigma+ cannot reach " + std::to_string(f_mw_hz) +
                      " Hz with B_dc >= 0; use the sigma- transition");
  if (transition == Transition::SigmaMinus && detuning > 0.0)
    throw DomainError("sigma- cannot reach " + std::to_string(f_mw_hz) +
                      " Hz with B_dc >= 0; use the sigma+ transition");
  return std::abs(detuning) / cfg.gamma_hz_per_t;
}

void SensingLayer::validate() const {
  if (!(thickness >= 0.0))
    throw DomainError("sensing layer thickness must be >= 0");
  if (!(height - thickness / 2.0 >= 0.0))
    throw DomainError("sensing layer must not extend below the device plane (h - d/2 < 0)");
  if (n_samples < 1)
    throw DomainError("sensing layer needs at least one sample");
}

std::vector<double> SensingLayer::sample_heights() const {
  if (thickness == 0.0)
    return {height};
  std::vector<double> z(static_cast<std::size_t>(n_samples));
  const double step = thickness / n_samples;
  const double bottom = height - thickness / 2.0;
  for (int k = 0; k < n_samples; ++k)
    z[static_cast<std::size_t>(k)] = bottom + (k + 0.5) * step;
  return z;
}

} // namespace nvscope
