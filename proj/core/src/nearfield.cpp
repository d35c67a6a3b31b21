#include "nvscope/nearfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "nvscope/errors.hpp"
#include "nvscope/parallel.hpp"

namespace nvscope {
namespace {

constexpr double kMuOver4Pi = 1e-7;  // mu0 / 4 pi with mu0 = 4 pi 1e-7

std::string describe(const Vec3 &p) {
  std::ostringstream os;
  os.precision(9);
  os << '(' << p.x << ", " << p.y << ", " << p.z << ") m";
  return os.str();
}

double distance_to_segment(const Vec3 &a, const Vec3 &b, const Vec3 &p) {
  const Vec3 ab = b - a;
  const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
  return norm(p - (a + ab * t));
}

} // namespace

void GridSpec::validate() const {
  if (nx < 1 || ny < 1)
    throw DomainError("grid needs nx, ny >= 1");
  if (!(pitch > 0.0) || !std::isfinite(pitch))
    throw DomainError("grid pitch must be positive");
  if (!is_finite(origin))
    throw DomainError("grid origin must be finite");
  constexpr double tol = 1e-12;
  if (std::abs(norm(axis_u) - 1.0) > tol || std::abs(norm(axis_v) - 1.0) > tol ||
      std::abs(dot(axis_u, axis_v)) > tol)
    throw DomainError("grid axes must be orthonormal");
}

std::string_view to_string(PolarizationComponent c) {
  switch (c) {
  case PolarizationComponent::SigmaPlus:
    return "sigma+";
  case PolarizationComponent::SigmaMinus:
    return "sigma-";
  case PolarizationComponent::Axial:
    break;
  }
  return "axial";
}

PolarizationComponent parse_component(std::string_view tag) {
  if (tag == "sigma+")
    return PolarizationComponent::SigmaPlus;
  if (tag == "sigma-")
    return PolarizationComponent::SigmaMinus;
  if (tag == "axial")
    return PolarizationComponent::Axial;
  throw DomainError("unknown polarization component '" + std::string(tag) + "'");
}

PolarizationComponent component_for(Transition t) {
  return t == Transition::SigmaPlus ? PolarizationComponent::SigmaPlus
                                    : PolarizationComponent::SigmaMinus;
}

ComplexVec3 segment_field(const WireSegment &seg, const Vec3 &p, double r_min) {
  const Vec3 r1 = p - seg.start;
  const Vec3 r2 = p - seg.end;
  if (seg.start == seg.end)
    throw DomainError("segment has zero length at " + describe(seg.start));
  if (distance_to_segment(seg.start, seg.end, p) < r_min)
    throw SingularityError("field point " + describe(p) + " lies within " + std::to_string(r_min) +
                           " m of segment " + describe(seg.start) + " -> " + describe(seg.end));
  // B = mu0 I / 4pi * (r1 x r2)(|r1| + |r2|) / (|r1||r2|(|r1||r2| + r1.r2)), equivalent to
  // mu0 I / (4 pi rho) (sin t2 - sin t1) along the azimuth but free of cancellation.
  const double n1 = norm(r1);
  const double n2 = norm(r2);
  const double denom = n1 * n2 * (n1 * n2 + dot(r1, r2));
  const Vec3 g = cross(r1, r2) * (kMuOver4Pi * (n1 + n2) / denom);
  return g * seg.current;
}

ComplexVec3 model_field(const CurrentModel &model, const Vec3 &p, double r_min) {
  ComplexVec3 total{};
  for (const auto &seg : model.segments)
    total += segment_field(seg, p, r_min);
  return total;
}

FieldPhasorMap evaluate_phasor_map(const CurrentModel &model, const GridSpec &grid,
                                   const SensingLayer &layer, unsigned threads) {
  grid.validate();
  layer.validate();
  const Vec3 normal = grid.normal();
  const auto heights = layer.sample_heights();
  const double inv_samples = 1.0 / static_cast<double>(heights.size());

  FieldPhasorMap out{grid, std::vector<ComplexVec3>(grid.size())};
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::string> failures(grid.size());
  std::vector<std::size_t> failed(grid.size(), kNone);

  parallel_for(grid.size(), resolve_threads(threads), [&](std::size_t idx) {
    const int i = static_cast<int>(idx % static_cast<std::size_t>(grid.nx));
    const int j = static_cast<int>(idx / static_cast<std::size_t>(grid.nx));
    const Vec3 base = grid.pixel_center(i, j);
    try {
      ComplexVec3 acc{};
      for (double h : heights)
        acc += model_field(model, base + normal * h);
      acc *= inv_samples;
      out.values[idx] = acc;
    } catch (const SingularityError &e) {
      failed[idx] = idx;
      failures[idx] = e.what();
    }
  });

  const auto first = std::find_if(failed.begin(), failed.end(), [](auto v) { return v != kNone; });
  if (first != failed.end()) {
    const std::size_t idx = *first;
    const int i = static_cast<int>(idx % static_cast<std::size_t>(grid.nx));
    const int j = static_cast<int>(idx / static_cast<std::size_t>(grid.nx));
    throw SingularityError("pixel (" + std::to_string(i) + ", " + std::to_string(j) +
                           "): " + failures[idx]);
  }
  return out;
}

PolarizedFieldMap project_polarization(const FieldPhasorMap &fmap, const NvFrame &frame,
                                       PolarizationComponent component) {
  PolarizedFieldMap out{fmap.grid, component, std::vector<double>(fmap.values.size())};
  for (std::size_t k = 0; k < fmap.values.size(); ++k) {
    const auto pol = decompose_polarization(fmap.values[k], frame);
    switch (component) {
    case PolarizationComponent::SigmaPlus:
      out.values[k] = pol.plus;
      break;
    case PolarizationComponent::SigmaMinus:
      out.values[k] = pol.minus;
      break;
    case PolarizationComponent::Axial:
      out.values[k] = pol.axial;
      break;
    }
  }
  return out;
}

} // namespace nvscope
