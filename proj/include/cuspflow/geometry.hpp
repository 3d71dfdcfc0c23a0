#pragma once

// Airfoil profiles, the slip line reconstructed from its slope, piecewise
// boundary functions with cusp fitting at the trailing edge, and the mollified
// extension of boundary slopes into the quarter plane.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "cuspflow/errors.hpp"
#include "cuspflow/grid.hpp"
#include "cuspflow/interp.hpp"

namespace cuspflow::geometry {

/// Cubic-Hermite airfoil family: upper/lower arcs share value h0 and slope
/// kstar at the trailing edge t = 1 (cusp) and vanish at the leading edge.
struct Profile {
  double h0 = 0.0;
  double kstar = 0.0;
  double c_thick = 0.0;

  double base(double t) const { return h0 * (3 * t * t - 2 * t * t * t) + kstar * (t * t * t - t * t); }
  double base_d(double t) const { return h0 * 6.0 * t * (1.0 - t) + kstar * (3 * t * t - 2 * t); }
  double base_dd(double t) const { return h0 * (6.0 - 12.0 * t) + kstar * (6.0 * t - 2.0); }
  double thick(double t) const { return c_thick * t * (1.0 - t) * (1.0 - t); }
  double thick_d(double t) const { return c_thick * (1.0 - 4.0 * t + 3.0 * t * t); }
  double thick_dd(double t) const { return c_thick * (6.0 * t - 4.0); }

  double zeta(int side, double t) const { return base(t) + side * thick(t); }
  double zeta_d(int side, double t) const { return base_d(t) + side * thick_d(t); }
  double zeta_dd(int side, double t) const { return base_dd(t) + side * thick_dd(t); }
};

inline Profile hermite_profile(double h0, double kstar, double c_thick) {
  if (c_thick < 0.0) throw DomainError("hermite_profile: thickness coefficient must be >= 0");
  return Profile{h0, kstar, c_thick};
}

/// Free-boundary unknown: the slip-line slope w sampled on [1, R], plus the
/// reconstructed height gT(t) = eps*h0 + integral of the interpolant of w.
class SlipLine {
 public:
  SlipLine() = default;

  SlipLine(double epsilon, double eps_h0, std::vector<double> t, std::vector<double> w)
      : epsilon_(epsilon), eps_h0_(eps_h0), t_(std::move(t)), w_(std::move(w)) {
    if (t_.size() < 2) throw DomainError("SlipLine: need at least two slope nodes");
    if (std::abs(t_.front() - 1.0) > 1e-14) throw DomainError("SlipLine: nodes must start at t = 1");
    interp_ = interp::MonotoneCubic(t_, w_);
  }

  double epsilon() const { return epsilon_; }
  const std::vector<double>& nodes() const { return t_; }
  const std::vector<double>& slopes() const { return w_; }
  double truncation() const { return t_.back(); }

  /// Slope w(t); clamps to w(R) beyond the truncation radius.
  double w(double t) const { return interp_(t); }
  double w_deriv(double t) const { return interp_.deriv(t); }

  /// Height gT(t); grows linearly with slope w(R) beyond the truncation radius.
  double gT(double t) const { return eps_h0_ + interp_.integral_from_start(t); }

  double sup_w() const {
    double m = 0.0;
    for (double v : w_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  double epsilon_ = 0.0;
  double eps_h0_ = 0.0;
  std::vector<double> t_, w_;
  interp::MonotoneCubic interp_;
};

/// Builds a slip line for thickness epsilon; validates the cusp-slope
/// compatibility w(1) = eps * kstar.
inline SlipLine make_slip_line(double epsilon, const Profile& profile, std::vector<double> t,
                               std::vector<double> w) {
  if (t.empty() || w.size() != t.size()) throw DomainError("make_slip_line: node/slope mismatch");
  const double want = epsilon * profile.kstar;
  if (std::abs(w.front() - want) > 1e-12 * std::max(1.0, std::abs(want)))
    throw ConsistencyError("make_slip_line: w(1) must equal eps*kstar");
  return SlipLine(epsilon, epsilon * profile.h0, std::move(t), std::move(w));
}

/// Piecewise boundary of one side: eps*zeta on the airfoil [0,1], the slip
/// line height on (1, R]. Value and first derivative are continuous at t = 1
/// by construction.
class BoundaryFn {
 public:
  BoundaryFn() = default;
  BoundaryFn(int side, Profile profile, SlipLine slip)
      : side_(side), profile_(profile), slip_(std::move(slip)) {}

  int side() const { return side_; }
  double epsilon() const { return slip_.epsilon(); }
  const SlipLine& slip() const { return slip_; }
  const Profile& profile() const { return profile_; }

  double value(double t) const {
    if (t <= 1.0) return slip_.epsilon() * profile_.zeta(side_, t);
    return slip_.gT(t);
  }
  double deriv(double t) const {
    if (t <= 1.0) return slip_.epsilon() * profile_.zeta_d(side_, t);
    return slip_.w(t);
  }
  double second(double t) const {
    if (t <= 1.0) return slip_.epsilon() * profile_.zeta_dd(side_, t);
    return slip_.w_deriv(t);
  }

 private:
  int side_ = +1;
  Profile profile_;
  SlipLine slip_;
};

inline BoundaryFn boundary_fn(const Profile& profile, const SlipLine& slip, int side) {
  if (side != +1 && side != -1) throw DomainError("boundary_fn: side must be +1 or -1");
  const double want = slip.epsilon() * profile.kstar;
  if (std::abs(slip.w(1.0) - want) > 1e-12 * std::max(1.0, std::abs(want)))
    throw ConsistencyError("boundary_fn: slip slope at t=1 inconsistent with cusp slope");
  return BoundaryFn(side, profile, slip);
}

/// Quartic bump 15/16 (1-t^2)^2 on [-1,1]; unit mass, even.
inline double mollifier_kernel(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  const double w = 1.0 - a * a;
  return 0.9375 * w * w;
}

/// Plateau cutoff: 1 on [-1,1], 0 outside (-2,2), quintic-smoothstep ramp.
inline double plateau_cutoff(double s) {
  const double a = std::abs(s);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double u = a - 1.0;
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

namespace detail {

// 12-point Gauss-Legendre rule on [0,1].
struct GaussRule {
  std::array<double, 12> x, w;
  GaussRule() {
    constexpr double xs[6] = {0.9815606342467192, 0.9041172563704749, 0.7699026741943047,
                              0.5873179542866175, 0.3678314989981802, 0.1252334085114689};
    constexpr double ws[6] = {0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
                              0.2031674267230659, 0.2334925365383548, 0.2491470458134028};
    for (int k = 0; k < 6; ++k) {
      x[k] = 0.5 * (1.0 - xs[k]);
      x[11 - k] = 0.5 * (1.0 + xs[k]);
      w[k] = 0.5 * ws[k];
      w[11 - k] = 0.5 * ws[k];
    }
  }
};

inline const GaussRule& gauss12() {
  static const GaussRule rule;
  return rule;
}

}  // namespace detail

/// Extension of a one-dimensional boundary slope into the quarter plane by a
/// moving average along rays: at height y2 the slope is sampled at arguments
/// y1 + t*y2, t in the kernel support, so no data left of y1 is ever needed;
/// a plateau cutoff removes the extension entirely above y2 = 2. The trace at
/// y2 = 0 reproduces the slope exactly.
class MollifiedExtension {
 public:
  MollifiedExtension(std::function<double(double)> gprime, std::vector<double> breakpoints)
      : gprime_(std::move(gprime)), breaks_(std::move(breakpoints)) {}

  double operator()(double y1, double y2) const {
    const double eta = plateau_cutoff(y2);
    if (eta == 0.0) return 0.0;
    if (y2 <= 0.0) return gprime_(y1);
    // split [0,1] where the sampled argument crosses a breakpoint of gprime
    std::array<double, 8> cuts{};
    std::size_t ncuts = 0;
    cuts[ncuts++] = 0.0;
    for (double b : breaks_) {
      const double tb = (b - y1) / y2;
      if (tb > 1e-13 && tb < 1.0 - 1e-13) cuts[ncuts++] = tb;
    }
    cuts[ncuts++] = 1.0;
    std::sort(cuts.begin(), cuts.begin() + ncuts);

    const auto& rule = detail::gauss12();
    double total = 0.0;
    for (std::size_t seg = 0; seg + 1 < ncuts; ++seg) {
      const double len = cuts[seg + 1] - cuts[seg];
      if (len <= 0.0) continue;
      constexpr int kPanels = 8;
      const double dp = len / kPanels;
      for (int p = 0; p < kPanels; ++p) {
        const double lo = cuts[seg] + p * dp;
        for (int q = 0; q < 12; ++q) {
          const double t = lo + dp * rule.x[q];
          total += dp * rule.w[q] * 2.0 * mollifier_kernel(t) * gprime_(y1 + t * y2);
        }
      }
    }
    return eta * total;
  }

 private:
  std::function<double(double)> gprime_;
  std::vector<double> breaks_;
};

/// Mollified extension of a boundary slope, with breakpoints at the cusp and
/// the truncation radius where the slope is only piecewise smooth.
inline MollifiedExtension mollified_extension_of(const BoundaryFn& bdry, double R) {
  return MollifiedExtension([bdry](double t) { return bdry.deriv(t); }, {1.0, R});
}

/// Samples an extension onto every node of a grid.
inline elliptic::ScalarField mollified_extension(const std::function<double(double)>& gprime,
                                                 std::shared_ptr<const elliptic::QuadrantGrid> grid) {
  const MollifiedExtension ext(gprime, {1.0, grid->R()});
  return elliptic::ScalarField::sample(std::move(grid),
                                       [&](double a, double b) { return ext(a, b); });
}

}  // namespace cuspflow::geometry
