#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "nvscope/currents.hpp"

namespace nvscope::io {

/// Parses {"kind": ..., "params": {...}}. Quantities carry unit suffixes ("width_m",
/// "width_um", "current_a", "current_ma"); currents are numbers or [re, im] pairs.
/// Unknown kinds raise DomainError, malformed fields ConfigError.
DeviceParams parse_device(const nlohmann::json &doc, const std::string &path = "device");

/// Canonical SI form of a device document (suffixes _m and _a).
nlohmann::json device_to_json(const DeviceParams &params);

} // namespace nvscope::io
