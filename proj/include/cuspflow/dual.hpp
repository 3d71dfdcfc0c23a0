#pragma once

#include <cmath>

namespace cuspflow {

/// First-order dual number: carries a value and one directional derivative.
/// Used to push exact derivatives through the gas closure formulas.
struct Dual {
  double v = 0.0;  ///< value
  double d = 0.0;  ///< derivative along the seeded direction

  Dual() = default;
  Dual(double value, double dot = 0.0) : v(value), d(dot) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
  const double inv = 1.0 / b.v;
  return {a.v * inv, (a.d - a.v * b.d * inv) * inv};
}
inline Dual operator+(Dual a, double b) { return {a.v + b, a.d}; }
inline Dual operator+(double a, Dual b) { return {a + b.v, b.d}; }
inline Dual operator-(Dual a, double b) { return {a.v - b, a.d}; }
inline Dual operator-(double a, Dual b) { return {a - b.v, -b.d}; }
inline Dual operator*(Dual a, double b) { return {a.v * b, a.d * b}; }
inline Dual operator*(double a, Dual b) { return {a * b.v, a * b.d}; }
inline Dual operator/(Dual a, double b) { return {a.v / b, a.d / b}; }
inline Dual operator/(double a, Dual b) {
  const double inv = 1.0 / b.v;
  return {a * inv, -a * b.d * inv * inv};
}

inline Dual pow(Dual x, double e) {
  const double p = std::pow(x.v, e);
  return {p, e * std::pow(x.v, e - 1.0) * x.d};
}
inline Dual sqrt(Dual x) {
  const double s = std::sqrt(x.v);
  return {s, 0.5 * x.d / s};
}

}  // namespace cuspflow
