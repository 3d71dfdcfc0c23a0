#pragma once

#include <stdexcept>
#include <string>

namespace cuspflow {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid thermodynamic or geometric input (violated precondition).
struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// The Bernoulli relation has no density root on the subsonic branch.
/// Recoverable: outer iterations catch this to reject a trial boundary.
struct NoSubsonicRoot : Error {
  double kinetic;    ///< kinetic term (v1^2+1)/(2 v2^2) that was requested
  double kinetic_max;///< largest value attainable on the subsonic branch
  NoSubsonicRoot(double kin, double kin_max)
      : Error("no subsonic density root: kinetic term " + std::to_string(kin) +
              " exceeds branch maximum " + std::to_string(kin_max)),
        kinetic(kin), kinetic_max(kin_max) {}
};

/// Flux Jacobian requested at a sonic state (c^2 == q^2).
struct SonicStateError : Error {
  explicit SonicStateError(const std::string& msg) : Error(msg) {}
};

/// Coefficients violated ellipticity or the smallness budget during assembly.
struct AssemblyError : Error {
  explicit AssemblyError(const std::string& msg) : Error(msg) {}
};

/// Linear solver failed to reach the requested residual.
struct SolverError : Error {
  double residual;
  SolverError(const std::string& msg, double res) : Error(msg), residual(res) {}
};

/// Nonlinear iteration (quadrant fixed point or free-boundary search)
/// failed to converge. Carries the residual history for diagnostics.
struct ConvergenceError : Error {
  std::vector<double> history;
  ConvergenceError(const std::string& msg, std::vector<double> hist)
      : Error(msg), history(std::move(hist)) {}
};

/// Mismatched construction data (e.g. slip slope not matching the cusp slope).
struct ConsistencyError : Error {
  explicit ConsistencyError(const std::string& msg) : Error(msg) {}
};

/// Invalid run configuration.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace cuspflow
