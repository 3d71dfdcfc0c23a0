#pragma once

// Fixed-point solver for one Lagrangian quadrant: given the boundary slope of
// the airfoil-plus-slip-line graph, iterate frozen-coefficient linear solves
// until the working variables v = (flow angle ratio, reciprocal momentum)
// satisfy the nonlinear flux system.
//
// The solver works in stretched coordinates z = (y1, s * psi) with
// s^2 = a11(v0), which turns the flat-state operator into the Laplacian.
// The lower quadrant is handled by reflecting onto the upper one: the solver
// is fed -(g^-)' as boundary slope, and the reflected solution relates to the
// physical one by flipping the sign of the flow angle.

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "cuspflow/elliptic.hpp"
#include "cuspflow/gas.hpp"
#include "cuspflow/geometry.hpp"
#include "cuspflow/grid.hpp"

namespace cuspflow::quadrant {

using elliptic::MixedBVP;
using elliptic::QuadrantGrid;
using elliptic::Region;
using elliptic::RowKind;
using elliptic::ScalarField;

/// Immutable per-side data: gas law, background, invariants, flat-state
/// constants and the y2 stretch factor.
struct QuadrantSetup {
  gas::GasLaw law;
  gas::UniformState bg;
  gas::HydroInvariants inv;
  gas::VelocityVars v0;
  double a_flat = 0.0;   ///< (N1)_v1 at the background
  double b_flat = 0.0;   ///< (N2)_v2 at the background
  double stretch = 1.0;  ///< s = sqrt(a_flat / b_flat); z2 = s * psi
  std::shared_ptr<const QuadrantGrid> grid;
};

inline QuadrantSetup make_setup(const gas::UniformState& bg, const gas::GasLaw& law,
                                std::shared_ptr<const QuadrantGrid> grid) {
  gas::validate_background(bg, law);
  QuadrantSetup s;
  s.law = law;
  s.bg = bg;
  s.inv = gas::hydro_invariants(bg, law);
  s.v0 = gas::background_v(s.inv);
  const auto j0 = gas::flux_jacobian(s.inv, s.v0, law);
  s.a_flat = j0.n1_v1;
  s.b_flat = j0.n2_v2;
  s.stretch = std::sqrt(s.a_flat / s.b_flat);
  s.grid = std::move(grid);
  return s;
}

struct QuadrantSolution {
  ScalarField v1, v2;                   ///< absolute working variables
  std::vector<double> update_history;   ///< sup-norm update per sweep
  int iterations = 0;
  double fixed_point_residual = 0.0;    ///< last sweep's update
};

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 50;
  double relax = 1.0;
  double lin_tol = 1e-12;
};

/// One frozen-coefficient linear solve: coefficients are evaluated at the
/// given iterate, the boundary slope enters as Dirichlet data on the bottom,
/// its mollified extension on the arc, and the homogeneous oblique condition
/// holds on the entrance. Returns the flow-angle perturbation field.
inline ScalarField linearized_sweep(const QuadrantSetup& setup, const ScalarField& v1,
                                    const ScalarField& v2,
                                    const std::function<double(double)>& gprime,
                                    double lin_tol = 1e-12) {
  const QuadrantGrid& g = *setup.grid;
  const double s = setup.stretch;
  const double s2 = s * s;
  const int n = static_cast<int>(g.size());

  MixedBVP bvp = MixedBVP::flat(setup.grid);
  for (int id = 0; id < n; ++id) {
    const gas::VelocityVars v{v1[id], v2[id]};
    const auto c = gas::coeff_a(setup.inv, v, setup.law);
    bvp.a11[id] = c.a11 / s2;
    bvp.a12[id] = c.a12 / s;
    if (bvp.kind[id] == RowKind::Interior) {
      const auto [i, j] = g.ij(id);
      const auto grad = gas::coeff_a_gradient(setup.inv, v, setup.law);
      const double dv1_dz1 = v1.d1(i, j);
      const double dv2_dz1 = v2.d1(i, j);
      bvp.b1[id] = (grad.a11_v1 * dv1_dz1 + grad.a11_v2 * dv2_dz1) / s2;
      bvp.b2[id] = (grad.a12_v1 * dv1_dz1 + grad.a12_v2 * dv2_dz1) / s;
    } else if (bvp.kind[id] == RowKind::Directional) {
      bvp.mu1[id] = bvp.a11[id];
      bvp.mu2[id] = bvp.a12[id];
      bvp.bc_value[id] = 0.0;
    }
  }
  const geometry::MollifiedExtension ext(gprime, {1.0, g.R()});
  for (int id = 0; id < n; ++id) {
    if (bvp.kind[id] != RowKind::Dirichlet) continue;
    if (g.region(id) == Region::L)
      bvp.bc_value[id] = gprime(g.node_y1(id));
    else
      bvp.bc_value[id] = ext(g.node_y1(id), g.node_y2(id));
  }
  return elliptic::solve_mixed_bvp(bvp, lin_tol);
}

/// Path-integral reconstruction of the reciprocal-momentum perturbation from
/// the flow-angle perturbation: integrates the vertical derivative along each
/// horizontal grid line from the entrance, where it vanishes identically.
inline ScalarField reconstruct_v2(const QuadrantSetup& setup, const ScalarField& dv1) {
  const QuadrantGrid& g = *setup.grid;
  ScalarField dv2(setup.grid, 0.0);
  const double s = setup.stretch;
  for (int j = 0; j < g.ny(); ++j) {
    double acc = 0.0;
    double prev_f = 0.0, prev_z = 0.0;
    for (int i = 0; g.kept(i, j); ++i) {
      const double z = g.y1(i);
      // arc-fringe nodes without a vertical neighbor inherit the integrand
      // from the left instead of degrading to zero
      const bool no_vertical = !g.kept(i, j - 1) && !g.kept(i, j + 1);
      const double f = (no_vertical && i > 0) ? prev_f : dv1.d2(i, j);
      if (i > 0) acc += 0.5 * (prev_f + f) * (z - prev_z);
      dv2[g.node(i, j)] = s * acc;
      prev_f = f;
      prev_z = z;
    }
  }
  return dv2;
}

/// Interior residual of the nonlinear flux system at the given fields,
/// evaluated with the field stencils: d/dz1 N1 + s * d/dz2 N2.
inline ScalarField nonlinear_residual(const QuadrantSetup& setup, const ScalarField& v1,
                                      const ScalarField& v2) {
  const QuadrantGrid& g = *setup.grid;
  ScalarField n1(setup.grid), n2(setup.grid), res(setup.grid);
  for (int id = 0; id < static_cast<int>(g.size()); ++id) {
    const auto f = gas::flux_N(setup.inv, {v1[id], v2[id]}, setup.law);
    n1[id] = f.n1;
    n2[id] = f.n2;
  }
  for (int id = 0; id < static_cast<int>(g.size()); ++id) {
    if (g.region(id) != Region::Interior) continue;
    const auto [i, j] = g.ij(id);
    res[id] = n1.d1(i, j) + setup.stretch * n2.d2(i, j);
  }
  return res;
}

/// Fixed-point iteration with coefficients frozen at the previous iterate.
/// Stops when the sup-norm update falls below tol.
inline QuadrantSolution solve_quadrant(const QuadrantSetup& setup,
                                       const std::function<double(double)>& gprime,
                                       const SolveOptions& opt = {}) {
  const QuadrantGrid& g = *setup.grid;
  const int n = static_cast<int>(g.size());
  QuadrantSolution sol;
  sol.v1 = ScalarField(setup.grid, setup.v0.v1);
  sol.v2 = ScalarField(setup.grid, setup.v0.v2);

  for (int it = 0; it < opt.max_iter; ++it) {
    const ScalarField dv1 = linearized_sweep(setup, sol.v1, sol.v2, gprime, opt.lin_tol);
    const ScalarField dv2 = reconstruct_v2(setup, dv1);
    double update = 0.0;
    for (int id = 0; id < n; ++id) {
      const double n1 = setup.v0.v1 + dv1[id];
      const double n2 = setup.v0.v2 + dv2[id];
      const double w1 = sol.v1[id] + opt.relax * (n1 - sol.v1[id]);
      const double w2 = sol.v2[id] + opt.relax * (n2 - sol.v2[id]);
      update = std::max(update, std::abs(w1 - sol.v1[id]));
      update = std::max(update, std::abs(w2 - sol.v2[id]));
      sol.v1[id] = w1;
      sol.v2[id] = w2;
    }
    sol.update_history.push_back(update);
    sol.iterations = it + 1;
    sol.fixed_point_residual = update;
    if (update < opt.tol) return sol;
    // admissibility of the new iterate; throws if a node left the subsonic branch
    for (int id = 0; id < n; ++id)
      gas::subsonic_density(setup.inv, {sol.v1[id], sol.v2[id]}, setup.law);
  }
  throw ConvergenceError("quadrant fixed point did not converge in " +
                             std::to_string(opt.max_iter) + " sweeps",
                         sol.update_history);
}

/// Physical-space reconstruction: per-column quadrature of the reciprocal
/// momentum gives the vertical coordinate; states follow from the closure.
/// side = +1 for the upper quadrant, -1 for the (reflected) lower one.
struct PhysicalField {
  std::shared_ptr<const QuadrantGrid> grid;
  int side = +1;
  double stretch = 1.0;
  std::vector<double> x2;      ///< physical height per node (x1 = node y1)
  std::vector<double> y_lagr;  ///< signed stream-function coordinate
  std::vector<double> rho, u1, u2, p;
};

inline PhysicalField to_physical(const QuadrantSetup& setup, const QuadrantSolution& sol,
                                 const geometry::BoundaryFn& bdry, int side) {
  const QuadrantGrid& g = *setup.grid;
  const int n = static_cast<int>(g.size());
  PhysicalField out;
  out.grid = setup.grid;
  out.side = side;
  out.stretch = setup.stretch;
  out.x2.assign(n, 0.0);
  out.y_lagr.assign(n, 0.0);
  out.rho.assign(n, 0.0);
  out.u1.assign(n, 0.0);
  out.u2.assign(n, 0.0);
  out.p.assign(n, 0.0);

  for (int id = 0; id < n; ++id) {
    const auto st = gas::state_from_v(setup.inv, {sol.v1[id], sol.v2[id]}, setup.law);
    out.rho[id] = st.rho;
    out.u1[id] = st.u1;
    out.u2[id] = side * st.u2;
    out.p[id] = st.p;
    out.y_lagr[id] = side * g.node_y2(id) / setup.stretch;
  }
  // column quadrature: x2 = g(y1) + side * integral of v2 d(psi)
  for (int i = 0; i < g.nx(); ++i) {
    if (!g.kept(i, 0)) continue;
    const double base = bdry.value(g.y1(i));
    double acc = 0.0;
    double prev_v = sol.v2[g.node(i, 0)], prev_z = 0.0;
    for (int j = 0; g.kept(i, j); ++j) {
      const double z = g.y2(j);
      const double v = sol.v2[g.node(i, j)];
      if (j > 0) acc += 0.5 * (prev_v + v) * (z - prev_z) / setup.stretch;
      out.x2[g.node(i, j)] = base + side * acc;
      prev_v = v;
      prev_z = z;
    }
  }
  return out;
}

/// Cross-check of the path-integral reconstruction: solves the second-order
/// equation satisfied by the reciprocal-momentum perturbation directly, with
/// the path-integral values pinned on the airfoil segment and the arc, and an
/// oblique condition carrying the boundary curvature on the slip segment.
inline ScalarField reconstruct_v2_elliptic(const QuadrantSetup& setup, const ScalarField& v1,
                                           const ScalarField& v2, const ScalarField& dv2_ref,
                                           const std::function<double(double)>& gsecond,
                                           double lin_tol = 1e-12) {
  const QuadrantGrid& g = *setup.grid;
  const double s = setup.stretch;
  MixedBVP bvp = MixedBVP::flat(setup.grid);
  for (int id = 0; id < static_cast<int>(g.size()); ++id) {
    const gas::VelocityVars v{v1[id], v2[id]};
    const auto tc = gas::tilde_coeffs(setup.inv, v, setup.law);
    const double denom = s * s * tc.a22t;
    bvp.a11[id] = 1.0 / denom;
    bvp.a12[id] = tc.a12t / (s * tc.a22t);
    const auto [i, j] = g.ij(id);
    switch (g.region(id)) {
      case Region::Interior: {
        const auto tg = gas::tilde_coeffs_gradient(setup.inv, v, setup.law);
        const double dv1_dz2 = v1.d2(i, j);
        const double dv2_dz2 = v2.d2(i, j);
        const double da12t = tg.a12t_v1 * dv1_dz2 + tg.a12t_v2 * dv2_dz2;
        const double da22t = tg.a22t_v1 * dv1_dz2 + tg.a22t_v2 * dv2_dz2;
        bvp.b1[id] = da12t / (s * tc.a22t);
        bvp.b2[id] = da22t / tc.a22t;
        break;
      }
      case Region::H:
        bvp.kind[id] = RowKind::Dirichlet;
        bvp.bc_value[id] = 0.0;
        break;
      case Region::S:
        bvp.bc_value[id] = dv2_ref[id];
        break;
      case Region::L: {
        const double t = g.node_y1(id);
        const bool slip = t > 1.0 + 1e-14;
        const bool can_form = g.kept(i, 1) && g.kept(i, 2) && g.kept(i - 1, 0) && g.kept(i + 1, 0);
        if (slip && can_form) {
          // from the linearized flux equation with the curl relation and the
          // tangential derivative of the bottom Dirichlet data
          bvp.kind[id] = RowKind::Directional;
          bvp.mu1[id] = tc.a12t / (s * tc.a22t);
          bvp.mu2[id] = 1.0;
          bvp.bc_value[id] = -gsecond(t) / (s * tc.a22t);
        } else {
          bvp.bc_value[id] = dv2_ref[id];
        }
        break;
      }
    }
  }
  return elliptic::solve_mixed_bvp(bvp, lin_tol);
}

}  // namespace cuspflow::quadrant
