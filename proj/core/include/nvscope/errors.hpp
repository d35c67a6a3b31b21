#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nvscope {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A field point fell inside the exclusion radius of a current segment.
class SingularityError : public Error {
public:
  using Error::Error;
};

/// Malformed or truncated binary/JSON file. `offset()` is the byte position of the problem.
class FormatError : public Error {
public:
  FormatError(const std::string &what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// The trace shows no oscillation above the detection threshold.
class NoOscillation : public Error {
public:
  using Error::Error;
};

class NotConverged : public Error {
public:
  using Error::Error;
};

/// Invalid configuration document. `path()` names the offending field (e.g. "device.params.width_um").
class ConfigError : public DomainError {
public:
  ConfigError(const std::string &path, const std::string &what)
      : DomainError(path + ": " + what), path_(path) {}
  const std::string &path() const noexcept { return path_; }

private:
  std::string path_;
};

/// A requested feature (e.g. a trap minimum) does not exist in the data.
class NotFound : public Error {
public:
  using Error::Error;
};

} // namespace nvscope
