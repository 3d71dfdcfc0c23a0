#pragma once
#include <cstdio>

// Discretization and solution of the truncated mixed boundary value problem
// on the quarter disc: a variable-coefficient second-order equation in
// non-divergence form
//     a11 v_11 + a12 v_12 + v_22 + b1 v_1 + b2 v_2 = f
// with Dirichlet rows on the bottom and the truncation arc and an oblique
// first-order condition on the entrance column. Coefficients are normalized
// (a21 = 0, a22 = 1); assembly enforces pointwise ellipticity and a smallness
// budget around the identity.

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "cuspflow/errors.hpp"
#include "cuspflow/fit.hpp"
#include "cuspflow/grid.hpp"
#include "cuspflow/stencils.hpp"

namespace cuspflow::elliptic {

/// Hard limit on how far coefficients may drift from the flat-state operator.
inline constexpr double kSmallnessBudget = 0.1;

enum class RowKind : std::uint8_t {
  Interior,    ///< full stencil row
  Dirichlet,   ///< identity row with prescribed value
  Directional  ///< mu1 d/dy1 + mu2 d/dy2 = rhs (one-sided into the domain)
};

/// Mixed boundary value problem on a quadrant grid. All arrays are nodal.
struct MixedBVP {
  std::shared_ptr<const QuadrantGrid> grid;
  std::vector<double> a11, a12, b1, b2, f;
  std::vector<RowKind> kind;
  std::vector<double> bc_value;  ///< Dirichlet value or directional right-hand side
  std::vector<double> mu1, mu2;  ///< directional coefficients

  /// Flat-operator problem: Laplacian, zero data, Dirichlet on L and S,
  /// homogeneous oblique condition d/dy1 = 0 on H.
  static MixedBVP flat(std::shared_ptr<const QuadrantGrid> g) {
    MixedBVP bvp;
    const std::size_t n = g->size();
    bvp.grid = std::move(g);
    bvp.a11.assign(n, 1.0);
    bvp.a12.assign(n, 0.0);
    bvp.b1.assign(n, 0.0);
    bvp.b2.assign(n, 0.0);
    bvp.f.assign(n, 0.0);
    bvp.kind.assign(n, RowKind::Interior);
    bvp.bc_value.assign(n, 0.0);
    bvp.mu1.assign(n, 1.0);
    bvp.mu2.assign(n, 0.0);
    for (std::size_t id = 0; id < n; ++id) {
      switch (bvp.grid->region(static_cast<int>(id))) {
        case Region::Interior: break;
        case Region::H: bvp.kind[id] = RowKind::Directional; break;
        case Region::L:
        case Region::S: bvp.kind[id] = RowKind::Dirichlet; break;
      }
    }
    return bvp;
  }
};

struct LinearSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;
  std::vector<double> row_scale;  ///< equilibration factors applied to A and rhs
  std::shared_ptr<const QuadrantGrid> grid;
};

namespace detail {

inline std::string node_name(const QuadrantGrid& g, int id) {
  const auto [i, j] = g.ij(id);
  return "(" + std::to_string(i) + "," + std::to_string(j) + ") at y=(" +
         std::to_string(g.y1(i)) + "," + std::to_string(g.y2(j)) + ")";
}

}  // namespace detail

inline LinearSystem assemble(const MixedBVP& bvp) {
  const QuadrantGrid& g = *bvp.grid;
  const int n = static_cast<int>(g.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * 9);
  Eigen::VectorXd rhs(n);

  for (int id = 0; id < n; ++id) {
    const auto [i, j] = g.ij(id);
    switch (bvp.kind[id]) {
      case RowKind::Dirichlet: {
        trips.emplace_back(id, id, 1.0);
        rhs[id] = bvp.bc_value[id];
        break;
      }
      case RowKind::Interior: {
        const double a11 = bvp.a11[id], a12 = bvp.a12[id];
        if (!(a11 - 0.25 * a12 * a12 > 0.0))
          throw AssemblyError("non-elliptic coefficients at node " + detail::node_name(g, id));
        if (std::abs(a11 - 1.0) > kSmallnessBudget || std::abs(a12) > kSmallnessBudget)
          throw AssemblyError("coefficients exceed the smallness budget at node " +
                              detail::node_name(g, id));
        if (!g.kept(i - 1, j) || !g.kept(i + 1, j) || !g.kept(i, j - 1) || !g.kept(i, j + 1))
          throw AssemblyError("interior row without full stencil at node " +
                              detail::node_name(g, id));
        const auto w1x = stencils::deriv1_weights(g.y1(i - 1), g.y1(i), g.y1(i + 1), g.y1(i));
        const auto w2x = stencils::deriv2_weights(g.y1(i - 1), g.y1(i), g.y1(i + 1));
        const auto w1y = stencils::deriv1_weights(g.y2(j - 1), g.y2(j), g.y2(j + 1), g.y2(j));
        const auto w2y = stencils::deriv2_weights(g.y2(j - 1), g.y2(j), g.y2(j + 1));
        // row is negated so the diagonal comes out positive
        for (int p = -1; p <= 1; ++p) {
          const int ip = i + p;
          trips.emplace_back(id, g.node(ip, j),
                             -(a11 * w2x[p + 1] + bvp.b1[id] * w1x[p + 1]));
          trips.emplace_back(id, g.node(i, j + p),
                             -(w2y[p + 1] + bvp.b2[id] * w1y[p + 1]));
          for (int q = -1; q <= 1; ++q)
            trips.emplace_back(id, g.node(ip, j + q), -a12 * w1x[p + 1] * w1y[q + 1]);
        }
        rhs[id] = -bvp.f[id];
        break;
      }
      case RowKind::Directional: {
        const double m1 = bvp.mu1[id], m2 = bvp.mu2[id];
        if (i == 0 && j > 0) {
          // entrance column: one-sided in y1, centered in y2
          if (!(m1 > 0.0))
            throw AssemblyError("oblique row not entrant at node " + detail::node_name(g, id));
          if (std::abs(m1 - 1.0) > kSmallnessBudget || std::abs(m2 / m1) > 2.0 * kSmallnessBudget)
            throw AssemblyError("oblique coefficients exceed the smallness budget at node " +
                                detail::node_name(g, id));
          if (!g.kept(1, j) || !g.kept(2, j) || !g.kept(0, j + 1))
            throw AssemblyError("entrance row without stencil at node " + detail::node_name(g, id));
          const auto wx = stencils::deriv1_weights(g.y1(0), g.y1(1), g.y1(2), g.y1(0));
          const auto wy = stencils::deriv1_weights(g.y2(j - 1), g.y2(j), g.y2(j + 1), g.y2(j));
          for (int p = 0; p < 3; ++p) trips.emplace_back(id, g.node(p, j), -m1 * wx[p]);
          for (int q = -1; q <= 1; ++q) trips.emplace_back(id, g.node(0, j + q), -m2 * wy[q + 1]);
          rhs[id] = -bvp.bc_value[id];
        } else if (j == 0) {
          // bottom row: one-sided in y2, centered in y1
          if (!(m2 > 0.0) || std::abs(m1) > std::abs(m2))
            throw AssemblyError("bottom directional row not entrant at node " +
                                detail::node_name(g, id));
          if (!g.kept(i, 1) || !g.kept(i, 2) || !g.kept(i - 1, 0) || !g.kept(i + 1, 0))
            throw AssemblyError("bottom row without stencil at node " + detail::node_name(g, id));
          const auto wy = stencils::deriv1_weights(g.y2(0), g.y2(1), g.y2(2), g.y2(0));
          const auto wx = stencils::deriv1_weights(g.y1(i - 1), g.y1(i), g.y1(i + 1), g.y1(i));
          for (int q = 0; q < 3; ++q) trips.emplace_back(id, g.node(i, q), -m2 * wy[q]);
          for (int p = -1; p <= 1; ++p) trips.emplace_back(id, g.node(i + p, 0), -m1 * wx[p + 1]);
          rhs[id] = -bvp.bc_value[id];
        } else {
          throw AssemblyError("directional row only supported on H or L, node " +
                              detail::node_name(g, id));
        }
        break;
      }
    }
  }

  // equilibrate rows: fine-grid second-derivative rows are ~1/h^2 larger than
  // Dirichlet rows, which would otherwise dominate the residual norm
  std::vector<double> row_max(n, 0.0);
  for (const auto& t : trips) row_max[t.row()] = std::max(row_max[t.row()], std::abs(t.value()));
  for (auto& t : trips) t = {t.row(), t.col(), t.value() / row_max[t.row()]};
  for (int id = 0; id < n; ++id) rhs[id] /= row_max[id];

  LinearSystem sys;
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  sys.A.makeCompressed();
  sys.rhs = std::move(rhs);
  sys.row_scale = std::move(row_max);
  sys.grid = bvp.grid;
  return sys;
}

/// Rebuilds only the right-hand side for a problem whose matrix (coefficient
/// fields, row kinds, mu's) is unchanged; row_scale must come from the
/// original assembly.
inline Eigen::VectorXd assemble_rhs(const MixedBVP& bvp, const std::vector<double>& row_scale) {
  const int n = static_cast<int>(bvp.grid->size());
  Eigen::VectorXd rhs(n);
  for (int id = 0; id < n; ++id) {
    double v = 0.0;
    switch (bvp.kind[id]) {
      case RowKind::Dirichlet: v = bvp.bc_value[id]; break;
      case RowKind::Interior: v = -bvp.f[id]; break;
      case RowKind::Directional: v = -bvp.bc_value[id]; break;
    }
    rhs[id] = v / row_scale[id];
  }
  return rhs;
}

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
  bool direct_fallback = false;
};

/// Krylov solve (BiCGSTAB with incomplete-LU preconditioning); falls back to
/// a sparse direct factorization if the iteration stagnates. Guarantees the
/// returned relative residual is below tol_rel or throws.
inline Eigen::VectorXd solve_linear(const LinearSystem& sys, double tol_rel = 1e-10,
                                    SolveStats* stats = nullptr) {
  const double bnorm = sys.rhs.norm();
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0, false};
    return Eigen::VectorXd::Zero(sys.A.rows());
  }

  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
  krylov.preconditioner().setDroptol(1e-7);
  krylov.preconditioner().setFillfactor(40);
  krylov.setTolerance(std::max(tol_rel * 1e-2, 1e-15));
  krylov.setMaxIterations(4000);
  krylov.compute(sys.A);
  Eigen::VectorXd x = krylov.solve(sys.rhs);
  double res = (sys.A * x - sys.rhs).norm() / bnorm;
  if (stats) {
    stats->iterations = static_cast<int>(krylov.iterations());
    stats->residual = res;
    stats->direct_fallback = false;
  }
  if (res <= tol_rel) return x;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> direct;
  direct.compute(sys.A);
  if (direct.info() == Eigen::Success) {
    x = direct.solve(sys.rhs);
    for (int refine = 0; refine < 3; ++refine) {
      const Eigen::VectorXd r = sys.rhs - sys.A * x;
      res = r.norm() / bnorm;
      if (res <= tol_rel) break;
      x += direct.solve(r);
    }
    res = (sys.A * x - sys.rhs).norm() / bnorm;
    if (stats) {
      stats->residual = res;
      stats->direct_fallback = true;
    }
    if (res <= tol_rel) return x;
  }
  char msg[128];
  std::snprintf(msg, sizeof(msg), "linear solve failed: residual %.3e above tolerance %.3e", res,
                tol_rel);
  throw SolverError(msg, res);
}

inline ScalarField solve_mixed_bvp(const MixedBVP& bvp, double tol_rel = 1e-10,
                                   SolveStats* stats = nullptr) {
  const LinearSystem sys = assemble(bvp);
  const Eigen::VectorXd x = solve_linear(sys, tol_rel, stats);
  ScalarField out(bvp.grid);
  for (int id = 0; id < x.size(); ++id) out[id] = x[id];
  return out;
}

/// Far-field and corner behavior of a solved field: log-log slopes of shell
/// averages of |v| on [R/4, R/2] and of |v - v(corner)| near the two corners.
struct FieldDiagnostics {
  fitting::LogLogFit far_decay;
  fitting::LogLogFit corner_O;
  fitting::LogLogFit corner_T;
};

inline FieldDiagnostics diagnose_field(const ScalarField& v) {
  const QuadrantGrid& g = v.grid();
  FieldDiagnostics d;

  std::vector<double> r, val;
  for (int id = 0; id < static_cast<int>(g.size()); ++id) {
    r.push_back(g.radius(id));
    val.push_back(v[id]);
  }
  d.far_decay = fitting::shell_fit(r, val, g.R() / 4.0, g.R() / 2.0, 10);

  auto corner = [&](double cx, double cy, double vc) {
    std::vector<double> rc, dv;
    for (int id = 0; id < static_cast<int>(g.size()); ++id) {
      const double rr = std::hypot(g.node_y1(id) - cx, g.node_y2(id) - cy);
      if (rr <= 0.0) continue;
      rc.push_back(rr);
      dv.push_back(v[id] - vc);
    }
    return fitting::shell_fit(rc, dv, std::max(4.0 * g.h_min(), 1e-4), 0.3, 8);
  };
  d.corner_O = corner(0.0, 0.0, v[g.node(0, 0)]);
  d.corner_T = corner(1.0, 0.0, v[g.node(g.i_unit(), 0)]);
  return d;
}

}  // namespace cuspflow::elliptic
