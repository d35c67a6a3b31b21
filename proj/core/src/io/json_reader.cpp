#include "nvscope/io/json_reader.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "nvscope/errors.hpp"

namespace nvscope::io {
namespace {

struct UnitEntry {
  Dimension dim;
  std::string_view suffix;
  double scale;
};

constexpr std::array kUnits{
    UnitEntry{Dimension::Length, "m", 1.0},         UnitEntry{Dimension::Length, "mm", 1e-3},
    UnitEntry{Dimension::Length, "um", 1e-6},       UnitEntry{Dimension::Length, "nm", 1e-9},
    UnitEntry{Dimension::Current, "a", 1.0},        UnitEntry{Dimension::Current, "ma", 1e-3},
    UnitEntry{Dimension::Current, "ua", 1e-6},      UnitEntry{Dimension::Frequency, "hz", 1.0},
    UnitEntry{Dimension::Frequency, "khz", 1e3},    UnitEntry{Dimension::Frequency, "mhz", 1e6},
    UnitEntry{Dimension::Frequency, "ghz", 1e9},    UnitEntry{Dimension::Time, "s", 1.0},
    UnitEntry{Dimension::Time, "ms", 1e-3},         UnitEntry{Dimension::Time, "us", 1e-6},
    UnitEntry{Dimension::Time, "ns", 1e-9},         UnitEntry{Dimension::Angle, "deg", 1.0},
    UnitEntry{Dimension::Field, "t", 1.0},          UnitEntry{Dimension::Field, "mt", 1e-3},
    UnitEntry{Dimension::Field, "ut", 1e-6},        UnitEntry{Dimension::Field, "nt", 1e-9},
    UnitEntry{Dimension::Gyromagnetic, "hz_per_t", 1.0},
    UnitEntry{Dimension::Gyromagnetic, "khz_per_ut", 1e9},
    UnitEntry{Dimension::Gyromagnetic, "mhz_per_mt", 1e9},
    UnitEntry{Dimension::Power, "dbm", 1.0},        UnitEntry{Dimension::Resistance, "ohm", 1.0},
};

double finite_number(const nlohmann::json &v, const std::string &path) {
  if (!v.is_number())
    throw ConfigError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d))
    throw ConfigError(path, "expected a finite number");
  return d;
}

} // namespace

std::optional<double> unit_scale(Dimension dim, std::string_view suffix) {
  for (const auto &u : kUnits)
    if (u.dim == dim && u.suffix == suffix)
      return u.scale;
  return std::nullopt;
}

ObjectReader::ObjectReader(const nlohmann::json &object, std::string path)
    : object_(object), path_(std::move(path)) {
  if (!object_.is_object())
    throw ConfigError(path_, "expected a JSON object");
}

std::string ObjectReader::field(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

bool ObjectReader::has(std::string_view base) const {
  for (auto it = object_.begin(); it != object_.end(); ++it) {
    const std::string &k = it.key();
    if (k == base || (k.size() > base.size() && k.compare(0, base.size(), base) == 0 &&
                      k[base.size()] == '_'))
      return true;
  }
  return false;
}

std::optional<std::pair<std::string, double>> ObjectReader::find_unit_key(std::string_view base,
                                                                          Dimension dim) {
  std::optional<std::pair<std::string, double>> found;
  for (const auto &u : kUnits) {
    if (u.dim != dim)
      continue;
    std::string key = std::string(base) + "_" + std::string(u.suffix);
    if (!object_.contains(key))
      continue;
    if (found)
      throw ConfigError(field(key), "conflicts with " + field(found->first));
    found = std::make_pair(std::move(key), u.scale);
  }
  if (!found && object_.contains(std::string(base)))
    throw ConfigError(field(base), "quantity needs an explicit unit suffix (e.g. " +
                                       std::string(base) + "_um)");
  if (found)
    used_.insert(found->first);
  return found;
}

std::optional<double> ObjectReader::quantity(std::string_view base, Dimension dim) {
  auto key = find_unit_key(base, dim);
  if (!key)
    return std::nullopt;
  return finite_number(object_.at(key->first), field(key->first)) * key->second;
}

double ObjectReader::quantity(std::string_view base, Dimension dim, double fallback) {
  return quantity(base, dim).value_or(fallback);
}

double ObjectReader::required_quantity(std::string_view base, Dimension dim) {
  auto v = quantity(base, dim);
  if (!v)
    throw ConfigError(field(base), "required quantity is missing");
  return *v;
}

std::optional<Complex> ObjectReader::complex_quantity(std::string_view base, Dimension dim) {
  auto key = find_unit_key(base, dim);
  if (!key)
    return std::nullopt;
  const auto &v = object_.at(key->first);
  const std::string f = field(key->first);
  if (v.is_number())
    return Complex{finite_number(v, f) * key->second, 0.0};
  if (!v.is_array() || v.size() != 2)
    throw ConfigError(f, "expected a number or an [re, im] pair");
  return Complex{finite_number(v[0], f + "[0]"), finite_number(v[1], f + "[1]")} * key->second;
}

Complex ObjectReader::complex_quantity(std::string_view base, Dimension dim, Complex fallback) {
  return complex_quantity(base, dim).value_or(fallback);
}

std::optional<Vec3> ObjectReader::vector_quantity(std::string_view base, Dimension dim) {
  auto key = find_unit_key(base, dim);
  if (!key)
    return std::nullopt;
  const auto &v = object_.at(key->first);
  const std::string f = field(key->first);
  if (!v.is_array() || v.size() != 3)
    throw ConfigError(f, "expected a 3-element array");
  return Vec3{finite_number(v[0], f + "[0]"), finite_number(v[1], f + "[1]"),
              finite_number(v[2], f + "[2]")} *
         key->second;
}

Vec3 ObjectReader::vector_quantity(std::string_view base, Dimension dim, const Vec3 &fallback) {
  return vector_quantity(base, dim).value_or(fallback);
}

std::optional<Vec3> ObjectReader::direction(std::string_view key) {
  const auto *v = raw(key);
  if (!v)
    return std::nullopt;
  const std::string f = field(key);
  if (!v->is_array() || v->size() != 3)
    throw ConfigError(f, "expected a 3-element array");
  return Vec3{finite_number((*v)[0], f + "[0]"), finite_number((*v)[1], f + "[1]"),
              finite_number((*v)[2], f + "[2]")};
}

std::optional<double> ObjectReader::number(std::string_view key) {
  const auto *v = raw(key);
  if (!v)
    return std::nullopt;
  return finite_number(*v, field(key));
}

double ObjectReader::number(std::string_view key, double fallback) {
  return number(key).value_or(fallback);
}

std::optional<long long> ObjectReader::integer(std::string_view key) {
  const auto *v = raw(key);
  if (!v)
    return std::nullopt;
  if (!v->is_number_integer())
    throw ConfigError(field(key), "expected an integer");
  return v->get<long long>();
}

long long ObjectReader::integer(std::string_view key, long long fallback) {
  return integer(key).value_or(fallback);
}

std::optional<std::string> ObjectReader::string(std::string_view key) {
  const auto *v = raw(key);
  if (!v)
    return std::nullopt;
  if (!v->is_string())
    throw ConfigError(field(key), "expected a string");
  return v->get<std::string>();
}

std::string ObjectReader::string(std::string_view key, const std::string &fallback) {
  return string(key).value_or(fallback);
}

std::optional<bool> ObjectReader::boolean(std::string_view key) {
  const auto *v = raw(key);
  if (!v)
    return std::nullopt;
  if (!v->is_boolean())
    throw ConfigError(field(key), "expected true or false");
  return v->get<bool>();
}

bool ObjectReader::boolean(std::string_view key, bool fallback) {
  return boolean(key).value_or(fallback);
}

const nlohmann::json *ObjectReader::raw(std::string_view key) {
  const std::string k(key);
  if (!object_.contains(k))
    return nullptr;
  used_.insert(k);
  return &object_.at(k);
}

ObjectReader ObjectReader::child(std::string_view key) {
  const auto *v = raw(key);
  if (!v)
    throw ConfigError(field(key), "required section is missing");
  return ObjectReader(*v, field(key));
}

std::optional<ObjectReader> ObjectReader::optional_child(std::string_view key) {
  const auto *v = raw(key);
  if (!v)
    return std::nullopt;
  return ObjectReader(*v, field(key));
}

void ObjectReader::finish() const {
  for (auto it = object_.begin(); it != object_.end(); ++it)
    if (!used_.contains(it.key()))
      throw ConfigError(field(it.key()), "unknown key");
}

nlohmann::json complex_json(Complex c) { return nlohmann::json::array({c.real(), c.imag()}); }

nlohmann::json vec3_json(const Vec3 &v) { return nlohmann::json::array({v.x, v.y, v.z}); }

} // namespace nvscope::io
