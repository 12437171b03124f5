#pragma once

#include <stdexcept>
#include <string>

namespace phasewalk {

// Invalid configuration or parameters (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Operand shapes that cannot be combined.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Eigensolver failure or a broken numerical invariant (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Fock truncation too small for the requested state (CLI exit code 3).
class TruncationError : public NumericalError {
 public:
  TruncationError(const std::string& what, double leakage)
      : NumericalError(what), leakage_(leakage) {}
  double leakage() const { return leakage_; }

 private:
  double leakage_;
};

}  // namespace phasewalk
