#pragma once

#include <stdexcept>
#include <string>

namespace driftstab {

// Invalid parameter values or malformed configuration files.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Bad runtime input to an operation (out-of-alphabet symbol, non-finite state).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// No lattice parameters satisfy the requested rate inequalities.
class SynthesisError : public std::runtime_error {
 public:
  explicit SynthesisError(const std::string& what) : std::runtime_error(what) {}
};

// Structural defect in a finite chain (not row-stochastic, reducible, ...).
class StructureError : public std::runtime_error {
 public:
  explicit StructureError(const std::string& what) : std::runtime_error(what) {}
};

// A trajectory produced a non-finite state; carries the offending step.
class NumericEscapeError : public std::runtime_error {
 public:
  NumericEscapeError(const std::string& what, long long step)
      : std::runtime_error(what), step_(step) {}
  long long step() const { return step_; }

 private:
  long long step_;
};

}  // namespace driftstab
