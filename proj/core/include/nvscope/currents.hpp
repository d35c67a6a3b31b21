#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nvscope/vec3.hpp"

namespace nvscope {

/// Straight filament carrying a complex (phasor) current in amperes.
struct WireSegment {
  Vec3 start;
  Vec3 end;
  Complex current;

  friend bool operator==(const WireSegment &, const WireSegment &) = default;
};

/// A device described as a list of current filaments.
struct CurrentModel {
  std::vector<WireSegment> segments;
  std::string label;

  CurrentModel scaled(Complex factor) const;
  CurrentModel translated(const Vec3 &shift) const;
  /// Sum of |end - start| over all segments.
  double total_length() const;
};

/// Transverse current distribution across a strip.
enum class CurrentProfile {
  Uniform,
  EdgeWeighted,  // 1/sqrt(1 - (2x/w)^2), the quasi-static thin-strip edge singularity
};

std::string_view to_string(CurrentProfile p);
CurrentProfile parse_profile(std::string_view tag);

inline constexpr int kDefaultFilaments = 32;

/// Planar strip of finite width following a centerline polyline. A polyline whose first and
/// last points coincide is treated as closed.
struct StripConductor {
  std::vector<Vec3> centerline;
  double width = 0.0;
  Complex total_current;
  CurrentProfile profile = CurrentProfile::EdgeWeighted;
  int n_filaments = kDefaultFilaments;
  Vec3 plane_normal{0, 0, 1};

  void validate() const;
};

/// Transverse offsets of filament bin midpoints, from -w/2 to +w/2.
std::vector<double> filament_offsets(double width, int n_filaments);

/// Fraction of the strip current carried by each filament; sums to 1.
std::vector<double> filament_weights(CurrentProfile profile, int n_filaments);

/// Splits the strip into parallel polyline filaments. Positive offsets lie to the right of the
/// direction of travel when viewed from +plane_normal.
CurrentModel discretize_strip(const StripConductor &strip);

/// Coplanar waveguide running along +Y, centred on x = 0 in the z = 0 plane.
struct CpwSpec {
  double signal_width = 120e-6;
  double gap = 54e-6;
  double ground_width = 150e-6;
  double length = 2e-3;
  Complex current{0.05, 0.0};
  double left_fraction = 0.5;   // share of the return current in the ground at -X
  double right_fraction = 0.5;  // share of the return current in the ground at +X
  CurrentProfile profile = CurrentProfile::EdgeWeighted;
  int n_filaments = kDefaultFilaments;
  Vec3 center{0, 0, 0};

  void validate() const;
};

CurrentModel build_cpw(const CpwSpec &spec);

/// Circular loop with a gap at -Y, fed by two straight leads running toward -Y.
struct OmegaLoopParams {
  double radius = 150e-6;
  double width = 30e-6;
  double gap = 60e-6;  // chord between the loop end points
  double lead_length = 300e-6;
  Complex current{0.05, 0.0};
  Vec3 center{0, 0, 0};
  CurrentProfile profile = CurrentProfile::EdgeWeighted;
  int n_filaments = 8;

  void validate() const;
};

/// Serpentine line: each turn is a vertical leg (alternating +Y/-Y) followed by a +X step.
struct MeanderParams {
  int turns = 6;
  double pitch = 60e-6;
  double leg = 300e-6;
  double width = 20e-6;
  Complex current{0.05, 0.0};
  Vec3 origin{0, 0, 0};
  CurrentProfile profile = CurrentProfile::EdgeWeighted;
  int n_filaments = 4;

  void validate() const;
};

/// Interdigital capacitor: a feed along +Y, an input comb whose fingers point +Y and an output
/// comb whose fingers point -Y, interleaved. Finger currents taper linearly to zero at the tips.
struct InterdigitalParams {
  int fingers_per_side = 4;
  double finger_length = 200e-6;
  double finger_width = 20e-6;
  double finger_spacing = 20e-6;  // edge-to-edge gap between neighbouring fingers
  double tip_gap = 20e-6;         // gap between finger tips and the opposite comb bar
  double feed_length = 200e-6;
  double feed_width = 60e-6;
  int finger_segments = 8;
  Complex current{0.05, 0.0};
  Vec3 origin{0, 0, 0};  // where the input feed meets the input bar
  CurrentProfile profile = CurrentProfile::EdgeWeighted;
  int n_filaments = 4;

  void validate() const;
};

/// Two concentric loops with counter-propagating currents (+current inner, -current outer).
struct TwoRingTrapParams {
  double inner_radius = 100e-6;
  double outer_radius = 200e-6;
  double width = 20e-6;
  Complex current{0.05, 0.0};
  Vec3 center{0, 0, 0};
  CurrentProfile profile = CurrentProfile::EdgeWeighted;
  int n_filaments = 4;

  void validate() const;
};

using DeviceParams =
    std::variant<CpwSpec, OmegaLoopParams, MeanderParams, InterdigitalParams, TwoRingTrapParams>;

/// Kind tag of a device ("cpw", "omega-loop", "meander", "interdigital", "two-ring-trap").
std::string_view device_kind(const DeviceParams &params);

CurrentModel build_device(const DeviceParams &params);

/// Centerline helpers, exposed for geometry checks.
std::vector<Vec3> omega_centerline(const OmegaLoopParams &p);
std::vector<Vec3> meander_centerline(const MeanderParams &p);
/// Points on an arc from angle a0 to a1 (radians, counter-clockwise) with chord <= max_chord.
std::vector<Vec3> arc_polyline(const Vec3 &center, double radius, double a0, double a1,
                               double max_chord);

/// Concatenates models; by linearity the field is the sum of the constituents' fields.
CurrentModel superpose(std::span<const CurrentModel> models);

} // namespace nvscope
