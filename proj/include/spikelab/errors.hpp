#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spikelab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed grids, mismatched field sizes, out-of-range shifts.
class GridError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration input. `line` is 0 when no source position applies.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A solver did not converge or produced an inadmissible result.
class SolverError : public Error {
 public:
  SolverError(const std::string& module, const std::string& what)
      : Error(module + ": " + what), module_(module) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

class SingularMatrixError : public SolverError {
 public:
  SingularMatrixError(const std::string& what, std::ptrdiff_t pivot)
      : SolverError("numerics-core", what), pivot_(pivot) {}
  /// Column at which the factorization broke down, -1 if unknown.
  std::ptrdiff_t pivot() const { return pivot_; }

 private:
  std::ptrdiff_t pivot_;
};

/// A structural hypothesis of the construction fails for the given data
/// (nonpositive potential, omega0 <= 0, curvature of omega of the wrong sign).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

/// The coupled solve converged but v has a single central bump.
class PeakMergerError : public SolverError {
 public:
  explicit PeakMergerError(const std::string& what) : SolverError("reduced-problem", what) {}
};

}  // namespace spikelab
