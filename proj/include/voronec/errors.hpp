#pragma once

#include <stdexcept>
#include <string>

namespace voronec {

/// Base class for all engine errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A quantity evaluated on (or too close to) the system's singular set.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, int index = -1)
      : Error(what), index_(index) {}
  /// Index of the offending variable, or -1 when not attributable.
  int index() const { return index_; }

 private:
  int index_;
};

/// State rejected by the system's admissibility guard.
class GuardViolation : public Error {
 public:
  using Error::Error;
};

/// Assembled equations lost the structure the theory guarantees
/// (C not SPD, singular reduced matrix, degenerate saddle system).
class FormulationError : public Error {
 public:
  using Error::Error;
};

/// Ill-formed system description (dimension mismatch, bad parameters).
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration (CLI / config file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace voronec
