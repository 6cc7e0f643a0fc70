#pragma once

#include <stdexcept>
#include <string>

namespace gupsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (bad dimension, negative beta0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Working precision too low for the requested phase reduction.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// Truncation dimension could not be accepted under the doubling policy.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration; `path` names the offending field ("plan.overrides.mass_u").
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace gupsim
