#include "nvscope/currents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nvscope/errors.hpp"

namespace nvscope {
namespace {

constexpr double kPi = std::numbers::pi;
// Upper bound on the miter stretch at sharp corners.
constexpr double kMaxMiterScale = 4.0;

void require_positive(double v, const char *name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string(name) + " must be positive and finite");
}

void require_finite(Complex c, const char *name) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
    throw DomainError(std::string(name) + " must be finite");
}

CurrentModel strip_piece(const Vec3 &a, const Vec3 &b, double width, Complex current,
                         CurrentProfile profile, int n_filaments) {
  return discretize_strip({{a, b}, width, current, profile, n_filaments, {0, 0, 1}});
}

void append(CurrentModel &into, const CurrentModel &from) {
  into.segments.insert(into.segments.end(), from.segments.begin(), from.segments.end());
}

} // namespace

CurrentModel CurrentModel::scaled(Complex factor) const {
  CurrentModel out = *this;
  for (auto &s : out.segments)
    s.current *= factor;
  return out;
}

CurrentModel CurrentModel::translated(const Vec3 &shift) const {
  CurrentModel out = *this;
  for (auto &s : out.segments) {
    s.start += shift;
    s.end += shift;
  }
  return out;
}

double CurrentModel::total_length() const {
  double total = 0.0;
  for (const auto &s : segments)
    total += norm(s.end - s.start);
  return total;
}

std::string_view to_string(CurrentProfile p) {
  return p == CurrentProfile::Uniform ? "uniform" : "edge-weighted";
}

CurrentProfile parse_profile(std::string_view tag) {
  if (tag == "uniform")
    return CurrentProfile::Uniform;
  if (tag == "edge-weighted" || tag == "edge")
    return CurrentProfile::EdgeWeighted;
  throw DomainError("unknown current profile '" + std::string(tag) + "'");
}

void StripConductor::validate() const {
  require_positive(width, "strip width");
  if (n_filaments < 1)
    throw DomainError("strip needs at least one filament");
  if (centerline.size() < 2)
    throw DomainError("strip centerline needs at least two points");
  require_finite(total_current, "strip current");
  if (!(norm(plane_normal) > 0.0))
    throw DomainError("strip plane normal must be non-zero");
  for (std::size_t i = 0; i + 1 < centerline.size(); ++i) {
    if (!is_finite(centerline[i]) || !is_finite(centerline[i + 1]))
      throw DomainError("strip centerline has non-finite points");
    if (centerline[i] == centerline[i + 1])
      throw DomainError("strip centerline has repeated consecutive points");
    if (!(norm(cross(centerline[i + 1] - centerline[i], plane_normal)) > 0.0))
      throw DomainError("strip centerline runs along the plane normal");
  }
}

std::vector<double> filament_offsets(double width, int n_filaments) {
  std::vector<double> x(static_cast<std::size_t>(n_filaments));
  // Integer numerators keep the offsets exactly antisymmetric about the centerline.
  for (int k = 0; k < n_filaments; ++k)
    x[static_cast<std::size_t>(k)] =
        static_cast<double>(2 * k + 1 - n_filaments) / (2.0 * n_filaments) * width;
  return x;
}

std::vector<double> filament_weights(CurrentProfile profile, int n_filaments) {
  if (n_filaments < 1)
    throw DomainError("need at least one filament");
  const auto n = static_cast<std::size_t>(n_filaments);
  std::vector<double> w(n, 1.0);
  if (profile == CurrentProfile::EdgeWeighted) {
    // Bin integrals of 1/sqrt(1 - y^2) over y in [-1, 1], i.e. differences of asin; the upper
    // half mirrors the lower so that the profile is exactly symmetric.
    for (std::size_t k = 0; k < (n + 1) / 2; ++k) {
      const double lo = -1.0 + 2.0 * static_cast<double>(k) / n_filaments;
      const double hi = -1.0 + 2.0 * static_cast<double>(k + 1) / n_filaments;
      w[k] = std::asin(std::min(hi, 1.0)) - std::asin(lo);
      w[n - 1 - k] = w[k];
    }
  }
  double total = 0.0;
  for (double v : w)
    total += v;
  for (double &v : w)
    v /= total;
  return w;
}

CurrentModel discretize_strip(const StripConductor &strip) {
  strip.validate();
  const auto &pts = strip.centerline;
  const std::size_t n_pts = pts.size();
  const std::size_t n_seg = n_pts - 1;
  const bool closed = n_pts >= 3 && pts.front() == pts.back();
  const Vec3 normal = normalized(strip.plane_normal);

  std::vector<Vec3> side(n_seg);
  for (std::size_t s = 0; s < n_seg; ++s)
    side[s] = normalized(cross(pts[s + 1] - pts[s], normal));

  const auto miter = [&](const Vec3 &before, const Vec3 &after) {
    const Vec3 sum = before + after;
    const double len = norm(sum);
    if (len < 1e-9)
      return after;
    const Vec3 dir = sum * (1.0 / len);
    const double scale = std::min(1.0 / dot(dir, after), kMaxMiterScale);
    return dir * scale;
  };

  std::vector<Vec3> offset_dir(n_pts);
  for (std::size_t i = 0; i < n_pts; ++i) {
    if (i == 0 || i == n_pts - 1)
      offset_dir[i] = closed ? miter(side[n_seg - 1], side[0]) : side[i == 0 ? 0 : n_seg - 1];
    else
      offset_dir[i] = miter(side[i - 1], side[i]);
  }

  const auto offsets = filament_offsets(strip.width, strip.n_filaments);
  const auto weights = filament_weights(strip.profile, strip.n_filaments);

  CurrentModel model;
  model.label = "strip";
  model.segments.reserve(offsets.size() * n_seg);
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const Complex current = strip.total_current * weights[k];
    for (std::size_t s = 0; s < n_seg; ++s) {
      const Vec3 a = pts[s] + offset_dir[s] * offsets[k];
      const Vec3 b = pts[s + 1] + offset_dir[s + 1] * offsets[k];
      if (a == b)
        continue;
      model.segments.push_back({a, b, current});
    }
  }
  return model;
}

void CpwSpec::validate() const {
  require_positive(signal_width, "CPW signal width");
  require_positive(gap, "CPW gap");
  require_positive(ground_width, "CPW ground width");
  require_positive(length, "CPW length");
  require_finite(current, "CPW current");
  if (left_fraction < 0.0 || right_fraction < 0.0)
    throw DomainError("CPW ground split fractions must be non-negative");
  if (std::abs(left_fraction + right_fraction - 1.0) > 1e-12)
    throw DomainError("CPW ground split fractions must sum to 1");
  if (n_filaments < 1)
    throw DomainError("CPW needs at least one filament per strip");
}

CurrentModel build_cpw(const CpwSpec &spec) {
  spec.validate();
  const double half = spec.length / 2.0;
  const double ground_offset = spec.signal_width / 2.0 + spec.gap + spec.ground_width / 2.0;
  const auto line = [&](double x) {
    return std::vector<Vec3>{{spec.center.x + x, spec.center.y - half, spec.center.z},
                             {spec.center.x + x, spec.center.y + half, spec.center.z}};
  };
  CurrentModel model;
  model.label = "cpw";
  append(model, discretize_strip({line(0.0), spec.signal_width, spec.current, spec.profile,
                                  spec.n_filaments, {0, 0, 1}}));
  append(model, discretize_strip({line(-ground_offset), spec.ground_width,
                                  -spec.current * spec.left_fraction, spec.profile,
                                  spec.n_filaments, {0, 0, 1}}));
  append(model, discretize_strip({line(ground_offset), spec.ground_width,
                                  -spec.current * spec.right_fraction, spec.profile,
                                  spec.n_filaments, {0, 0, 1}}));
  return model;
}

std::vector<Vec3> arc_polyline(const Vec3 &center, double radius, double a0, double a1,
                               double max_chord) {
  require_positive(radius, "arc radius");
  require_positive(max_chord, "arc chord");
  const double span = a1 - a0;
  const double max_step = max_chord >= 2.0 * radius ? kPi : 2.0 * std::asin(max_chord / (2.0 * radius));
  const auto pieces = std::max<long>(1, static_cast<long>(std::ceil(std::abs(span) / max_step)));
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(pieces) + 1);
  for (long k = 0; k <= pieces; ++k) {
    const double a = a0 + span * static_cast<double>(k) / static_cast<double>(pieces);
    pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a), center.z});
  }
  return pts;
}

void OmegaLoopParams::validate() const {
  require_positive(radius, "omega-loop radius");
  require_positive(width, "omega-loop width");
  require_positive(gap, "omega-loop gap");
  require_positive(lead_length, "omega-loop lead length");
  require_finite(current, "omega-loop current");
  if (!(gap < 2.0 * radius))
    throw DomainError("omega-loop gap must be shorter than the loop diameter");
  if (!(gap > width))
    throw DomainError("omega-loop gap must exceed the strip width so the leads do not overlap");
  if (!(width < radius))
    throw DomainError("omega-loop width must be smaller than its radius");
  if (n_filaments < 1)
    throw DomainError("omega-loop needs at least one filament");
}

std::vector<Vec3> omega_centerline(const OmegaLoopParams &p) {
  p.validate();
  const double half_gap_angle = std::asin(p.gap / (2.0 * p.radius));
  const double a0 = -kPi / 2.0 + half_gap_angle;
  const double a1 = 3.0 * kPi / 2.0 - half_gap_angle;
  // Chord limit on the outermost filament.
  const double chord = p.width / 4.0 * p.radius / (p.radius + p.width / 2.0);
  auto arc = arc_polyline(p.center, p.radius, a0, a1, chord);
  const Vec3 down{0, -p.lead_length, 0};
  std::vector<Vec3> pts;
  pts.reserve(arc.size() + 2);
  pts.push_back(arc.front() + down);
  pts.insert(pts.end(), arc.begin(), arc.end());
  pts.push_back(arc.back() + down);
  return pts;
}

void MeanderParams::validate() const {
  if (turns < 1)
    throw DomainError("meander needs at least one turn");
  require_positive(pitch, "meander pitch");
  require_positive(leg, "meander leg");
  require_positive(width, "meander width");
  require_finite(current, "meander current");
  if (!(width < pitch))
    throw DomainError("meander width must be smaller than its pitch");
  if (n_filaments < 1)
    throw DomainError("meander needs at least one filament");
}

std::vector<Vec3> meander_centerline(const MeanderParams &p) {
  p.validate();
  std::vector<Vec3> pts{p.origin};
  Vec3 cur = p.origin;
  for (int k = 0; k < p.turns; ++k) {
    cur.y += (k % 2 == 0) ? p.leg : -p.leg;
    pts.push_back(cur);
    cur.x += p.pitch;
    pts.push_back(cur);
  }
  return pts;
}

void InterdigitalParams::validate() const {
  if (fingers_per_side < 1)
    throw DomainError("interdigital capacitor needs at least one finger per comb");
  require_positive(finger_length, "finger length");
  require_positive(finger_width, "finger width");
  require_positive(finger_spacing, "finger spacing");
  require_positive(tip_gap, "finger tip gap");
  require_positive(feed_length, "feed length");
  require_positive(feed_width, "feed width");
  require_finite(current, "interdigital current");
  if (finger_segments < 1)
    throw DomainError("fingers need at least one segment");
  if (n_filaments < 1)
    throw DomainError("interdigital capacitor needs at least one filament");
}

namespace {

CurrentModel build_interdigital(const InterdigitalParams &p) {
  p.validate();
  const int n = p.fingers_per_side;
  const double slot = p.finger_width + p.finger_spacing;
  const double y_in = p.origin.y;
  const double y_out = p.origin.y + p.finger_length + p.tip_gap;
  const double z = p.origin.z;
  const Complex per_finger = p.current / static_cast<double>(n);
  const auto piece = [&](const Vec3 &a, const Vec3 &b, double w, Complex i) {
    return strip_piece(a, b, w, i, p.profile, p.n_filaments);
  };

  CurrentModel model;
  model.label = "interdigital";
  append(model, piece({p.origin.x, y_in - p.feed_length, z}, {p.origin.x, y_in, z}, p.feed_width,
                      p.current));

  std::vector<double> in_x;
  std::vector<double> out_x;
  for (int j = 0; j < 2 * n; ++j) {
    const double x = p.origin.x + (j - (2.0 * n - 1.0) / 2.0) * slot;
    (j % 2 == 0 ? in_x : out_x).push_back(x);
  }

  const int m = p.finger_segments;
  const double step = p.finger_length / m;
  for (double x : in_x) {
    for (int k = 0; k < m; ++k) {
      const double taper = 1.0 - (k + 0.5) / m;
      append(model, piece({x, y_in + k * step, z}, {x, y_in + (k + 1) * step, z}, p.finger_width,
                          per_finger * taper));
    }
  }
  for (double x : out_x) {
    const double tip = y_out - p.finger_length;
    for (int k = 0; k < m; ++k) {
      const double taper = (k + 0.5) / m;
      append(model, piece({x, tip + k * step, z}, {x, tip + (k + 1) * step, z}, p.finger_width,
                          per_finger * taper));
    }
  }

  // Comb bars: current spreads from (input) or gathers to (output) the feed point at origin.x.
  const auto bar = [&](const std::vector<double> &fingers, double y, bool outward) {
    std::vector<double> nodes = fingers;
    nodes.push_back(p.origin.x);
    std::sort(nodes.begin(), nodes.end());
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const double a = nodes[i];
      const double b = nodes[i + 1];
      if (a == b)
        continue;
      const double mid = 0.5 * (a + b);
      const auto beyond = std::count_if(fingers.begin(), fingers.end(), [&](double x) {
        return mid > p.origin.x ? x > mid : x < mid;
      });
      if (beyond == 0)
        continue;
      const Complex i_bar = per_finger * static_cast<double>(beyond);
      // Away from the feed point on the input bar, toward it on the output bar.
      const bool plus_x = (mid > p.origin.x) == outward;
      const Vec3 from{plus_x ? a : b, y, z};
      const Vec3 to{plus_x ? b : a, y, z};
      append(model, piece(from, to, p.finger_width, i_bar));
    }
  };
  bar(in_x, y_in, true);
  bar(out_x, y_out, false);

  append(model, piece({p.origin.x, y_out, z}, {p.origin.x, y_out + p.feed_length, z},
                      p.feed_width, p.current));
  return model;
}

} // namespace

void TwoRingTrapParams::validate() const {
  require_positive(inner_radius, "inner ring radius");
  require_positive(outer_radius, "outer ring radius");
  require_positive(width, "ring width");
  require_finite(current, "ring current");
  if (!(outer_radius > inner_radius))
    throw DomainError("outer ring radius must exceed the inner radius");
  if (!(outer_radius - inner_radius > width))
    throw DomainError("rings overlap: radial separation must exceed the strip width");
  if (!(width < 2.0 * inner_radius))
    throw DomainError("ring width too large for the inner radius");
  if (n_filaments < 1)
    throw DomainError("rings need at least one filament");
}

namespace {

CurrentModel build_two_ring_trap(const TwoRingTrapParams &p) {
  p.validate();
  const auto ring = [&](double r, Complex current) {
    const double chord = p.width / 4.0 * r / (r + p.width / 2.0);
    auto pts = arc_polyline(p.center, r, 0.0, 2.0 * kPi, chord);
    pts.back() = pts.front();
    return discretize_strip({std::move(pts), p.width, current, p.profile, p.n_filaments, {0, 0, 1}});
  };
  CurrentModel model;
  model.label = "two-ring-trap";
  append(model, ring(p.inner_radius, p.current));
  append(model, ring(p.outer_radius, -p.current));
  return model;
}

} // namespace

std::string_view device_kind(const DeviceParams &params) {
  struct Visitor {
    std::string_view operator()(const CpwSpec &) const { return "cpw"; }
    std::string_view operator()(const OmegaLoopParams &) const { return "omega-loop"; }
    std::string_view operator()(const MeanderParams &) const { return "meander"; }
    std::string_view operator()(const InterdigitalParams &) const { return "interdigital"; }
    std::string_view operator()(const TwoRingTrapParams &) const { return "two-ring-trap"; }
  };
  return std::visit(Visitor{}, params);
}

CurrentModel build_device(const DeviceParams &params) {
  struct Visitor {
    CurrentModel operator()(const CpwSpec &p) const { return build_cpw(p); }
    CurrentModel operator()(const OmegaLoopParams &p) const {
      auto m = discretize_strip(
          {omega_centerline(p), p.width, p.current, p.profile, p.n_filaments, {0, 0, 1}});
      m.label = "omega-loop";
      return m;
    }
    CurrentModel operator()(const MeanderParams &p) const {
      auto m = discretize_strip(
          {meander_centerline(p), p.width, p.current, p.profile, p.n_filaments, {0, 0, 1}});
      m.label = "meander";
      return m;
    }
    CurrentModel operator()(const InterdigitalParams &p) const { return build_interdigital(p); }
    CurrentModel operator()(const TwoRingTrapParams &p) const { return build_two_ring_trap(p); }
  };
  return std::visit(Visitor{}, params);
}

CurrentModel superpose(std::span<const CurrentModel> models) {
  CurrentModel out;
  std::size_t total = 0;
  for (const auto &m : models)
    total += m.segments.size();
  out.segments.reserve(total);
  for (const auto &m : models) {
    append(out, m);
    if (!m.label.empty())
      out.label += (out.label.empty() ? "" : "+") + m.label;
  }
  return out;
}

} // namespace nvscope
