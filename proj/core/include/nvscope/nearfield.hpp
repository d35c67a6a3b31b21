#pragma once

#include <string_view>
#include <vector>

#include "nvscope/currents.hpp"
#include "nvscope/fieldcore.hpp"
#include "nvscope/vec3.hpp"

namespace nvscope {

/// Evaluation closer than this to a filament is rejected (m).
inline constexpr double kExclusionRadius = 0.1e-6;

/// Pixel-centred image plane: pixel (i, j) sits at
/// origin + (i + 0.5) pitch axis_u + (j + 0.5) pitch axis_v. Values are stored row-major
/// (index j * nx + i).
struct GridSpec {
  Vec3 origin;
  Vec3 axis_u{1, 0, 0};
  Vec3 axis_v{0, 1, 0};
  int nx = 1;
  int ny = 1;
  double pitch = 1e-6;

  void validate() const;
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  Vec3 normal() const { return cross(axis_u, axis_v); }
  Vec3 pixel_center(int i, int j) const {
    return origin + axis_u * ((i + 0.5) * pitch) + axis_v * ((j + 0.5) * pitch);
  }
  friend bool operator==(const GridSpec &, const GridSpec &) = default;
};

struct FieldPhasorMap {
  GridSpec grid;
  std::vector<ComplexVec3> values;

  const ComplexVec3 &at(int i, int j) const { return values[grid.index(i, j)]; }
};

enum class PolarizationComponent { SigmaPlus, SigmaMinus, Axial };

std::string_view to_string(PolarizationComponent c);
PolarizationComponent parse_component(std::string_view tag);
PolarizationComponent component_for(Transition t);

/// Non-negative scalar field map in teslas.
struct PolarizedFieldMap {
  GridSpec grid;
  PolarizationComponent component = PolarizationComponent::SigmaMinus;
  std::vector<double> values;

  double at(int i, int j) const { return values[grid.index(i, j)]; }
  double &at(int i, int j) { return values[grid.index(i, j)]; }
};

/// Analytic Biot-Savart field of a straight finite segment; complex current carried linearly.
/// Throws SingularityError when p is closer than r_min to the segment.
ComplexVec3 segment_field(const WireSegment &seg, const Vec3 &p, double r_min = kExclusionRadius);

/// Sum of segment fields in model order.
ComplexVec3 model_field(const CurrentModel &model, const Vec3 &p, double r_min = kExclusionRadius);

/// Per-pixel field averaged over the sensing layer. Layer heights are offsets along the grid
/// normal. Parallel over pixels; results do not depend on the thread count.
FieldPhasorMap evaluate_phasor_map(const CurrentModel &model, const GridSpec &grid,
                                   const SensingLayer &layer, unsigned threads = 0);

PolarizedFieldMap project_polarization(const FieldPhasorMap &fmap, const NvFrame &frame,
                                       PolarizationComponent component);

} // namespace nvscope
