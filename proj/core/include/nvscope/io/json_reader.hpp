#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "nvscope/vec3.hpp"

namespace nvscope::io {

/// Physical dimension of a unit-suffixed JSON key such as "width_um" or "current_ma".
enum class Dimension { Length, Current, Frequency, Time, Angle, Field, Gyromagnetic, Power, Resistance };

/// Scale from the unit named by `suffix` (without the underscore) to SI, if it belongs to `dim`.
std::optional<double> unit_scale(Dimension dim, std::string_view suffix);

/// Reads one JSON object, resolving unit-suffixed keys to SI values and recording which keys
/// were consumed. Every error is a ConfigError carrying the dotted field path.
class ObjectReader {
public:
  ObjectReader(const nlohmann::json &object, std::string path);

  const std::string &path() const { return path_; }
  bool has(std::string_view base) const;

  /// Quantity `base_<unit>` converted to SI. Exactly one unit variant may be present.
  std::optional<double> quantity(std::string_view base, Dimension dim);
  double quantity(std::string_view base, Dimension dim, double fallback);
  double required_quantity(std::string_view base, Dimension dim);

  /// Complex quantity: a number or an [re, im] pair.
  std::optional<Complex> complex_quantity(std::string_view base, Dimension dim);
  Complex complex_quantity(std::string_view base, Dimension dim, Complex fallback);

  /// Three-component quantity, e.g. "origin_um": [x, y, z].
  std::optional<Vec3> vector_quantity(std::string_view base, Dimension dim);
  Vec3 vector_quantity(std::string_view base, Dimension dim, const Vec3 &fallback);

  /// Dimensionless unit vector given without suffix, e.g. "axis_u": [1, 0, 0].
  std::optional<Vec3> direction(std::string_view key);

  std::optional<double> number(std::string_view key);
  double number(std::string_view key, double fallback);
  std::optional<long long> integer(std::string_view key);
  long long integer(std::string_view key, long long fallback);
  std::optional<std::string> string(std::string_view key);
  std::string string(std::string_view key, const std::string &fallback);
  std::optional<bool> boolean(std::string_view key);
  bool boolean(std::string_view key, bool fallback);
  const nlohmann::json *raw(std::string_view key);
  ObjectReader child(std::string_view key);
  std::optional<ObjectReader> optional_child(std::string_view key);

  /// Throws if any key was never consumed.
  void finish() const;

private:
  std::string field(std::string_view key) const;
  std::optional<std::pair<std::string, double>> find_unit_key(std::string_view base, Dimension dim);

  const nlohmann::json &object_;
  std::string path_;
  std::set<std::string> used_;
};

/// Writes a complex value as [re, im].
nlohmann::json complex_json(Complex c);
nlohmann::json vec3_json(const Vec3 &v);

} // namespace nvscope::io
