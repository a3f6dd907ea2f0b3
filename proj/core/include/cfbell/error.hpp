#pragma once

#include <stdexcept>
#include <string>

namespace cfbell {

/** Base class of every error raised by the library. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Party or outcome counts outside the supported range. */
class InvalidScenario : public Error {
 public:
  using Error::Error;
};

/** Arguments outside an operation's domain (bad outcome, mismatched scenario, ...). */
class DomainError : public Error {
 public:
  using Error::Error;
};

/** A weight or expression family applied to a scenario it does not exist for. */
class FamilyMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

/** A computation would exceed its configured enumeration or memory budget. */
class ResourceError : public Error {
 public:
  using Error::Error;
};

/** An iterative numerical routine failed to meet its residual target. */
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/** Malformed run configuration; `location` names the offending key or flag. */
class ParseError : public DomainError {
 public:
  ParseError(const std::string& location, const std::string& what)
      : DomainError(location + ": " + what), location_(location) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

}  // namespace cfbell
