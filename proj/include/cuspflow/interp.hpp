#pragma once

// Monotone cubic (Fritsch-Carlson) interpolation on nonuniform nodes, with an
// exact running integral of the interpolant.

#include <cmath>
#include <vector>

#include "cuspflow/errors.hpp"

namespace cuspflow::interp {

class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("MonotoneCubic: need >= 2 matching nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i] < x_[i + 1])) throw DomainError("MonotoneCubic: nodes must increase strictly");
    d_.assign(n, 0.0);
    std::vector<double> h(n - 1), s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      s[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      d_[0] = d_[1] = s[0];
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (s[i - 1] * s[i] <= 0.0) {
          d_[i] = 0.0;
        } else {
          const double w1 = 2.0 * h[i] + h[i - 1];
          const double w2 = h[i] + 2.0 * h[i - 1];
          d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
        }
      }
      d_[0] = endpoint_slope(h[0], h[1], s[0], s[1]);
      d_[n - 1] = endpoint_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    }
    // running integral of the cubic pieces
    integral_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double seg = h[i] * 0.5 * (y_[i] + y_[i + 1]) + h[i] * h[i] * (d_[i] - d_[i + 1]) / 12.0;
      integral_[i + 1] = integral_[i] + seg;
    }
  }

  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }

  /// Interpolant value; clamps to the end values outside the node range.
  double operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return y_[i] * (2 * u3 - 3 * u2 + 1) + y_[i + 1] * (-2 * u3 + 3 * u2) +
           d_[i] * h * (u3 - 2 * u2 + u) + d_[i + 1] * h * (u3 - u2);
    }

  /// Derivative of the interpolant; 0 outside the node range (clamped value).
  double deriv(double t) const {
    if (t < x_.front() || t > x_.back()) return 0.0;
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double u2 = u * u;
    return (y_[i] * (6 * u2 - 6 * u) + y_[i + 1] * (-6 * u2 + 6 * u)) / h +
           d_[i] * (3 * u2 - 4 * u + 1) + d_[i + 1] * (3 * u2 - 2 * u);
  }

  /// Exact integral of the (clamped) interpolant from the first node to t.
  double integral_from_start(double t) const {
    if (t <= x_.front()) return (t - x_.front()) * y_.front();
    if (t >= x_.back()) return integral_.back() + (t - x_.back()) * y_.back();
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double u2 = u * u, u3 = u2 * u, u4 = u2 * u2;
    const double part =
        y_[i] * h * (0.5 * u4 - u3 + u) + y_[i + 1] * h * (-0.5 * u4 + u3) +
        d_[i] * h * h * (0.25 * u4 - (2.0 / 3.0) * u3 + 0.5 * u2) +
        d_[i + 1] * h * h * (0.25 * u4 - u3 / 3.0);
    return integral_[i] + part;
  }

 private:
  static double endpoint_slope(double h0, double h1, double s0, double s1) {
    double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (d * s0 <= 0.0)
      d = 0.0;
    else if (s0 * s1 < 0.0 && std::abs(d) > 3.0 * std::abs(s0))
      d = 3.0 * s0;
    return d;
  }

  std::size_t segment(double t) const {
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= t ? lo : hi) = mid;
    }
    return lo;
  }

  std::vector<double> x_, y_, d_, integral_;
};

/// Plain C1 cubic Hermite interpolant with three-point finite-difference
/// slopes. Unlike the monotone variant it is linear in the data, which
/// matters when interpolating directions of a differential.
class CubicHermite {
 public:
  CubicHermite() = default;
  CubicHermite(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("CubicHermite: need >= 2 matching nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(x_[i] < x_[i + 1])) throw DomainError("CubicHermite: nodes must increase strictly");
    d_.assign(n, 0.0);
    if (n == 2) {
      d_[0] = d_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = (i == 0) ? 0 : (i == n - 1 ? n - 3 : i - 1);
        const double x0 = x_[a], x1 = x_[a + 1], x2 = x_[a + 2];
        const double xe = x_[i];
        const double d01 = x0 - x1, d02 = x0 - x2, d12 = x1 - x2;
        d_[i] = y_[a] * (2 * xe - x1 - x2) / (d01 * d02) +
                y_[a + 1] * (2 * xe - x0 - x2) / (-d01 * d12) +
                y_[a + 2] * (2 * xe - x0 - x1) / (d02 * d12);
      }
    }
    integral_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = x_[i + 1] - x_[i];
      integral_[i + 1] =
          integral_[i] + h * 0.5 * (y_[i] + y_[i + 1]) + h * h * (d_[i] - d_[i + 1]) / 12.0;
    }
  }

  double operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return y_[i] * (2 * u3 - 3 * u2 + 1) + y_[i + 1] * (-2 * u3 + 3 * u2) +
           d_[i] * h * (u3 - 2 * u2 + u) + d_[i + 1] * h * (u3 - u2);
  }

  double integral_from_start(double t) const {
    if (t <= x_.front()) return (t - x_.front()) * y_.front();
    if (t >= x_.back()) return integral_.back() + (t - x_.back()) * y_.back();
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double u2 = u * u, u3 = u2 * u, u4 = u2 * u2;
    return integral_[i] + y_[i] * h * (0.5 * u4 - u3 + u) + y_[i + 1] * h * (-0.5 * u4 + u3) +
           d_[i] * h * h * (0.25 * u4 - (2.0 / 3.0) * u3 + 0.5 * u2) +
           d_[i + 1] * h * h * (0.25 * u4 - u3 / 3.0);
  }

 private:
  std::size_t segment(double t) const {
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= t ? lo : hi) = mid;
    }
    return lo;
  }

  std::vector<double> x_, y_, d_, integral_;
};

}  // namespace cuspflow::interp
