#pragma once

// Thermodynamic closure for steady polytropic gas flow in stream-function
// coordinates: background states, streamline invariants, the subsonic density
// branch, the (u2, p) flux pair as a function of the working variables
// v = (u2/u1, 1/(rho*u1)), its Jacobian, and the induced elliptic coefficients.

#include <algorithm>
#include <cmath>
#include <string>

#include "cuspflow/dual.hpp"
#include "cuspflow/errors.hpp"

namespace cuspflow::gas {

/// Polytropic gas law p = A * rho^gamma.
struct GasLaw {
  double gamma = 1.4;

  void validate() const {
    if (!(gamma > 1.0)) throw DomainError("GasLaw: gamma must exceed 1");
  }
};

/// Uniform horizontal background state (one per side; pressure shared).
struct UniformState {
  double rho0 = 1.0;  ///< density
  double q0 = 0.5;    ///< horizontal speed
  double p0 = 1.0;    ///< pressure
};

/// Pointwise gas state.
struct FlowState {
  double rho = 0.0;
  double u1 = 0.0;
  double u2 = 0.0;
  double p = 0.0;
};

/// Streamline invariants: entropy function A = p/rho^gamma, Bernoulli
/// quantity B, horizontal mass flux m1 = rho*u1. Constant per side.
struct HydroInvariants {
  double A = 0.0;
  double B = 0.0;
  double m1 = 0.0;
};

/// Working variables of the elliptic system:
/// v1 = u2/u1 (flow angle ratio), v2 = 1/(rho*u1) (reciprocal momentum).
struct VelocityVars {
  double v1 = 0.0;
  double v2 = 0.0;
};

/// Coefficients of the scalar second-order equation for the flow angle.
/// Normalized so a21 = 0 and a22 = 1; margin = a11 - (a12/2)^2 > 0 iff
/// the state is subsonic with u1 > 0.
struct EllipticCoeffs {
  double a11 = 1.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 1.0;
  double margin = 1.0;
};

/// Jacobian of the flux pair (N1, N2) = (u2, p) with respect to (v1, v2).
struct FluxJacobian {
  double n1_v1 = 0.0;
  double n1_v2 = 0.0;
  double n2_v1 = 0.0;
  double n2_v2 = 0.0;
};

/// Gradient of the elliptic coefficients with respect to (v1, v2).
struct CoeffGradient {
  double a11_v1 = 0.0;
  double a11_v2 = 0.0;
  double a12_v1 = 0.0;
  double a12_v2 = 0.0;
};

struct SoundSpeedMach {
  double c = 0.0;
  double mach = 0.0;
};

inline SoundSpeedMach sound_speed_mach(const FlowState& s, const GasLaw& law) {
  if (!(s.rho > 0.0) || !(s.p > 0.0))
    throw DomainError("sound_speed_mach: need rho > 0 and p > 0");
  const double c = std::sqrt(law.gamma * s.p / s.rho);
  const double q = std::hypot(s.u1, s.u2);
  return {c, q / c};
}

inline HydroInvariants hydro_invariants(const UniformState& bg, const GasLaw& law) {
  law.validate();
  if (!(bg.rho0 > 0.0) || !(bg.p0 > 0.0) || !(bg.q0 > 0.0))
    throw DomainError("hydro_invariants: background must have rho0, q0, p0 > 0");
  HydroInvariants inv;
  inv.A = bg.p0 / std::pow(bg.rho0, law.gamma);
  inv.B = 0.5 * bg.q0 * bg.q0 + law.gamma * bg.p0 / ((law.gamma - 1.0) * bg.rho0);
  inv.m1 = bg.rho0 * bg.q0;
  return inv;
}

/// Open/closed endpoints of the subsonic density bracket (rho_crit, rho_max].
struct DensityBracket {
  double rho_crit = 0.0;  ///< sonic threshold: G'(rho_crit) = 0
  double rho_max = 0.0;   ///< stagnation density: G(rho_max) = 0
};

inline DensityBracket density_bracket(const HydroInvariants& inv, const GasLaw& law) {
  const double g = law.gamma;
  DensityBracket b;
  b.rho_crit = std::pow(2.0 * (g - 1.0) * inv.B / (g * (g + 1.0) * inv.A), 1.0 / (g - 1.0));
  b.rho_max = std::pow((g - 1.0) * inv.B / (g * inv.A), 1.0 / (g - 1.0));
  return b;
}

namespace detail {

// G(rho) = B rho^2 - gamma/(gamma-1) A rho^(gamma+1); the Bernoulli relation
// reads G(rho) = (v1^2+1)/(2 v2^2). G is strictly decreasing on the subsonic
// bracket, which makes the root unique there.
inline double bernoulli_G(double rho, const HydroInvariants& inv, double gamma) {
  return inv.B * rho * rho - gamma / (gamma - 1.0) * inv.A * std::pow(rho, gamma + 1.0);
}

inline double bernoulli_dG(double rho, const HydroInvariants& inv, double gamma) {
  return 2.0 * inv.B * rho - gamma * (gamma + 1.0) / (gamma - 1.0) * inv.A * std::pow(rho, gamma);
}

}  // namespace detail

/// Unique density on the subsonic branch for given invariants and working
/// variables. Bracketed bisection followed by a Newton polish.
inline double subsonic_density(const HydroInvariants& inv, const VelocityVars& v,
                               const GasLaw& law) {
  if (!(v.v2 > 0.0)) throw DomainError("subsonic_density: v2 must be positive");
  const double kinetic = (v.v1 * v.v1 + 1.0) / (2.0 * v.v2 * v.v2);
  const DensityBracket br = density_bracket(inv, law);
  const double kinetic_max = detail::bernoulli_G(br.rho_crit, inv, law.gamma);
  if (kinetic >= kinetic_max) throw NoSubsonicRoot(kinetic, kinetic_max);
  if (kinetic == 0.0) return br.rho_max;

  double lo = br.rho_crit, hi = br.rho_max;
  // G decreases from kinetic_max to 0 on [lo, hi].
  for (int it = 0; it < 200 && (hi - lo) > 1e-6 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::bernoulli_G(mid, inv, law.gamma) > kinetic)
      lo = mid;
    else
      hi = mid;
  }
  double rho = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    const double f = detail::bernoulli_G(rho, inv, law.gamma) - kinetic;
    const double df = detail::bernoulli_dG(rho, inv, law.gamma);
    const double step = f / df;
    double next = rho - step;
    next = std::clamp(next, br.rho_crit, br.rho_max);
    const bool done = std::abs(next - rho) <= 1e-13 * rho;
    rho = next;
    if (done) break;
  }
  return rho;
}

/// Implicit derivative of the subsonic density root with respect to (v1, v2).
inline void subsonic_density_gradient(const HydroInvariants& inv, const VelocityVars& v,
                                      const GasLaw& law, double rho, double* drho_dv1,
                                      double* drho_dv2) {
  // F(rho, v) = kinetic(v) - G(rho) = 0 with dG/drho < 0 on the branch.
  const double dG = detail::bernoulli_dG(rho, inv, law.gamma);
  const double dk_dv1 = v.v1 / (v.v2 * v.v2);
  const double dk_dv2 = -(v.v1 * v.v1 + 1.0) / (v.v2 * v.v2 * v.v2);
  *drho_dv1 = dk_dv1 / dG;
  *drho_dv2 = dk_dv2 / dG;
}

inline FlowState state_from_v(const HydroInvariants& inv, const VelocityVars& v,
                              const GasLaw& law) {
  const double rho = subsonic_density(inv, v, law);
  FlowState s;
  s.rho = rho;
  s.u1 = 1.0 / (rho * v.v2);
  s.u2 = v.v1 * s.u1;
  s.p = inv.A * std::pow(rho, law.gamma);
  return s;
}

struct FluxPair {
  double n1 = 0.0;  ///< u2
  double n2 = 0.0;  ///< p
};

inline FluxPair flux_N(const HydroInvariants& inv, const VelocityVars& v, const GasLaw& law) {
  const FlowState s = state_from_v(inv, v, law);
  return {s.u2, s.p};
}

namespace detail {

// Flux Jacobian entries as closed forms of the state; templated so dual
// numbers can carry d/dv through them.
template <class S>
struct JacobianExpr {
  S n1_v1, n1_v2, n2_v2;
};

template <class S>
JacobianExpr<S> jacobian_expr(S rho, S v1, S v2, double A, double gamma) {
  using std::pow;
  const S u1 = 1.0 / (rho * v2);
  const S u2 = v1 * u1;
  const S c2 = gamma * A * pow(rho, gamma - 1.0);
  const S q2 = u1 * u1 + u2 * u2;
  const S denom = c2 - q2;
  JacobianExpr<S> j;
  j.n1_v1 = u1 * (c2 - u1 * u1) / denom;
  j.n1_v2 = -(c2 * rho * u1 * u2) / denom;
  j.n2_v2 = c2 * rho * rho * q2 * u1 / denom;
  return j;
}

}  // namespace detail

inline FluxJacobian flux_jacobian(const HydroInvariants& inv, const VelocityVars& v,
                                  const GasLaw& law) {
  const double rho = subsonic_density(inv, v, law);
  const double u1 = 1.0 / (rho * v.v2);
  const double u2 = v.v1 * u1;
  const double c2 = law.gamma * inv.A * std::pow(rho, law.gamma - 1.0);
  const double q2 = u1 * u1 + u2 * u2;
  if (c2 == q2) throw SonicStateError("flux_jacobian: sonic state, c^2 == q^2");
  const auto j = detail::jacobian_expr<double>(rho, v.v1, v.v2, inv.A, law.gamma);
  return {j.n1_v1, j.n1_v2, j.n1_v2, j.n2_v2};
}

inline EllipticCoeffs coeff_a(const HydroInvariants& inv, const VelocityVars& v,
                              const GasLaw& law) {
  const FluxJacobian j = flux_jacobian(inv, v, law);
  EllipticCoeffs c;
  c.a11 = j.n1_v1 / j.n2_v2;
  c.a12 = 2.0 * j.n1_v2 / j.n2_v2;
  c.a21 = 0.0;
  c.a22 = 1.0;
  c.margin = c.a11 - 0.25 * c.a12 * c.a12;
  return c;
}

/// Closed-form ellipticity margin (c^2-q^2) u1^2 / (c^2 rho^2 q^4); used as an
/// algebraic cross-check of coeff_a.
inline double ellipticity_margin_closed_form(const HydroInvariants& inv,
                                             const VelocityVars& v, const GasLaw& law) {
  const FlowState s = state_from_v(inv, v, law);
  const double c2 = law.gamma * s.p / s.rho;
  const double q2 = s.u1 * s.u1 + s.u2 * s.u2;
  return (c2 - q2) * s.u1 * s.u1 / (c2 * s.rho * s.rho * q2 * q2);
}

/// d(a11)/dv, d(a12)/dv via dual-number evaluation of the closed forms,
/// with the density root differentiated implicitly. Feeds the first-order
/// terms of the non-divergence operator.
inline CoeffGradient coeff_a_gradient(const HydroInvariants& inv, const VelocityVars& v,
                                      const GasLaw& law) {
  const double rho = subsonic_density(inv, v, law);
  double dr1, dr2;
  subsonic_density_gradient(inv, v, law, rho, &dr1, &dr2);

  CoeffGradient g;
  for (int dir = 0; dir < 2; ++dir) {
    const Dual rd(rho, dir == 0 ? dr1 : dr2);
    const Dual v1d(v.v1, dir == 0 ? 1.0 : 0.0);
    const Dual v2d(v.v2, dir == 0 ? 0.0 : 1.0);
    const auto j = detail::jacobian_expr<Dual>(rd, v1d, v2d, inv.A, law.gamma);
    const Dual a11 = j.n1_v1 / j.n2_v2;
    const Dual a12 = 2.0 * j.n1_v2 / j.n2_v2;
    if (dir == 0) {
      g.a11_v1 = a11.d;
      g.a12_v1 = a12.d;
    } else {
      g.a11_v2 = a11.d;
      g.a12_v2 = a12.d;
    }
  }
  return g;
}

/// Gradient of the flux-Jacobian entries with respect to (v1, v2); appears in
/// the first-order terms of divergence-form linearizations.
struct FluxJacobianGradient {
  double n1_v1_d1 = 0.0, n1_v1_d2 = 0.0;
  double n1_v2_d1 = 0.0, n1_v2_d2 = 0.0;
  double n2_v2_d1 = 0.0, n2_v2_d2 = 0.0;
};

inline FluxJacobianGradient flux_jacobian_gradient(const HydroInvariants& inv,
                                                   const VelocityVars& v, const GasLaw& law) {
  const double rho = subsonic_density(inv, v, law);
  double dr1, dr2;
  subsonic_density_gradient(inv, v, law, rho, &dr1, &dr2);
  FluxJacobianGradient g;
  for (int dir = 0; dir < 2; ++dir) {
    const Dual rd(rho, dir == 0 ? dr1 : dr2);
    const Dual v1d(v.v1, dir == 0 ? 1.0 : 0.0);
    const Dual v2d(v.v2, dir == 0 ? 0.0 : 1.0);
    const auto j = detail::jacobian_expr<Dual>(rd, v1d, v2d, inv.A, law.gamma);
    if (dir == 0) {
      g.n1_v1_d1 = j.n1_v1.d;
      g.n1_v2_d1 = j.n1_v2.d;
      g.n2_v2_d1 = j.n2_v2.d;
    } else {
      g.n1_v1_d2 = j.n1_v1.d;
      g.n1_v2_d2 = j.n1_v2.d;
      g.n2_v2_d2 = j.n2_v2.d;
    }
  }
  return g;
}

/// Coefficients of the second-order equation satisfied by the reciprocal
/// momentum component (used only as a cross-check of the path-integral
/// reconstruction): a12t = 2 (N1)_v2 / (N1)_v1, a22t = (N2)_v2 / (N1)_v1.
struct TildeCoeffs {
  double a12t = 0.0;
  double a22t = 1.0;
};

inline TildeCoeffs tilde_coeffs(const HydroInvariants& inv, const VelocityVars& v,
                                const GasLaw& law) {
  const FluxJacobian j = flux_jacobian(inv, v, law);
  return {2.0 * j.n1_v2 / j.n1_v1, j.n2_v2 / j.n1_v1};
}

struct TildeGradient {
  double a12t_v1 = 0.0, a12t_v2 = 0.0;
  double a22t_v1 = 0.0, a22t_v2 = 0.0;
};

inline TildeGradient tilde_coeffs_gradient(const HydroInvariants& inv, const VelocityVars& v,
                                           const GasLaw& law) {
  const double rho = subsonic_density(inv, v, law);
  double dr1, dr2;
  subsonic_density_gradient(inv, v, law, rho, &dr1, &dr2);
  TildeGradient g;
  for (int dir = 0; dir < 2; ++dir) {
    const Dual rd(rho, dir == 0 ? dr1 : dr2);
    const Dual v1d(v.v1, dir == 0 ? 1.0 : 0.0);
    const Dual v2d(v.v2, dir == 0 ? 0.0 : 1.0);
    const auto j = detail::jacobian_expr<Dual>(rd, v1d, v2d, inv.A, law.gamma);
    const Dual a12t = 2.0 * j.n1_v2 / j.n1_v1;
    const Dual a22t = j.n2_v2 / j.n1_v1;
    if (dir == 0) {
      g.a12t_v1 = a12t.d;
      g.a22t_v1 = a22t.d;
    } else {
      g.a12t_v2 = a12t.d;
      g.a22t_v2 = a22t.d;
    }
  }
  return g;
}

/// Background working variables: v = (0, 1/m1).
inline VelocityVars background_v(const HydroInvariants& inv) { return {0.0, 1.0 / inv.m1}; }

/// Validates that a background state is admissible (positive, subsonic).
inline void validate_background(const UniformState& bg, const GasLaw& law) {
  law.validate();
  if (!(bg.rho0 > 0.0) || !(bg.p0 > 0.0))
    throw ConfigError("background state must have rho0 > 0 and p0 > 0");
  if (!(bg.q0 > 0.0)) throw ConfigError("background state must have q0 > 0");
  const auto cm = sound_speed_mach({bg.rho0, bg.q0, 0.0, bg.p0}, law);
  if (!(cm.mach < 1.0))
    throw ConfigError("background state must be subsonic, got Mach " + std::to_string(cm.mach));
}

}  // namespace cuspflow::gas
