#pragma once

#include <array>

namespace cuspflow::stencils {

/// Weights of the interpolating quadratic through (x0,x1,x2) for the first
/// derivative evaluated at xe (one of the three abscissae or anywhere).
inline std::array<double, 3> deriv1_weights(double x0, double x1, double x2, double xe) {
  const double d01 = x0 - x1, d02 = x0 - x2, d12 = x1 - x2;
  return {(2.0 * xe - x1 - x2) / (d01 * d02),
          (2.0 * xe - x0 - x2) / (-d01 * d12),
          (2.0 * xe - x0 - x1) / (d02 * d12)};
}

/// Second-derivative weights of the same quadratic (constant in xe).
inline std::array<double, 3> deriv2_weights(double x0, double x1, double x2) {
  const double d01 = x0 - x1, d02 = x0 - x2, d12 = x1 - x2;
  return {2.0 / (d01 * d02), -2.0 / (d01 * d12), 2.0 / (d02 * d12)};
}

}  // namespace cuspflow::stencils
