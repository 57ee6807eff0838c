#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace khinchin {

/// Malformed textual input. `position()` is a character offset for decimal
/// strings and a 1-based line number for files.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested accuracy cannot be met; carries the best bound available.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achievable)
      : std::runtime_error(what), achievable_(achievable) {}
  double achievable_bound() const noexcept { return achievable_; }

 private:
  double achievable_;
};

/// A cached or downloaded file failed its hash check and was quarantined.
class CorruptFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transport failure. Partial downloads are kept, so retrying resumes.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace khinchin
