#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cuspflow/quadrant.hpp"

using namespace cuspflow;
using namespace cuspflow::quadrant;

namespace {

const gas::GasLaw kAir{1.4};
const gas::UniformState kBgPlus{1.0, 0.5, 1.0};
const geometry::Profile kProfile = geometry::hermite_profile(0.5, 0.2, 1.0);

std::vector<double> slip_nodes_from_grid(const QuadrantGrid& g) {
  std::vector<double> t;
  for (int i = g.i_unit(); i < g.nx() && g.kept(i, 0); ++i) t.push_back(g.y1(i));
  return t;
}

geometry::BoundaryFn reference_boundary(double eps, const QuadrantGrid& g, double beta = 0.5) {
  auto t = slip_nodes_from_grid(g);
  std::vector<double> w(t.size());
  for (std::size_t k = 0; k < t.size(); ++k)
    w[k] = eps * kProfile.kstar * std::min(1.0, std::pow(t[k], -beta));
  return geometry::boundary_fn(kProfile, geometry::make_slip_line(eps, kProfile, t, w), +1);
}

double bump(double x, double c, double hw) {
  const double u = (x - c) / hw;
  return std::abs(u) >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - u * u));
}

}  // namespace

TEST_CASE("zero boundary slope converges immediately to the background") {
  auto g = elliptic::build_grid(8.0, 24, 1.5);
  const auto setup = make_setup(kBgPlus, kAir, g);
  const auto sol = solve_quadrant(setup, [](double) { return 0.0; });
  CHECK(sol.iterations == 1);
  for (int id = 0; id < static_cast<int>(g->size()); ++id) {
    CHECK(sol.v1[id] == setup.v0.v1);
    CHECK(sol.v2[id] == setup.v0.v2);
  }
}

TEST_CASE("sweep at the background reduces to the flat mixed problem") {
  auto g = elliptic::build_grid(8.0, 24, 1.5);
  const auto setup = make_setup(kBgPlus, kAir, g);
  auto gprime = [](double t) { return 0.01 * bump(t, 2.0, 1.0); };

  const ScalarField v1(g, setup.v0.v1), v2(g, setup.v0.v2);
  const ScalarField dv1 = linearized_sweep(setup, v1, v2, gprime, 1e-12);

  MixedBVP flat = MixedBVP::flat(g);
  const geometry::MollifiedExtension ext(gprime, {1.0, g->R()});
  for (int id = 0; id < static_cast<int>(g->size()); ++id)
    if (flat.kind[id] == RowKind::Dirichlet)
      flat.bc_value[id] = (g->region(id) == Region::L) ? gprime(g->node_y1(id))
                                                       : ext(g->node_y1(id), g->node_y2(id));
  const ScalarField ref = elliptic::solve_mixed_bvp(flat, 1e-12);
  double diff = 0.0;
  for (int id = 0; id < static_cast<int>(g->size()); ++id)
    diff = std::max(diff, std::abs(dv1[id] - ref[id]));
  CHECK(diff <= 1e-11);

  SECTION("bottom trace equals the boundary data exactly") {
    for (int id : g->bottom_nodes()) CHECK(dv1[id] == gprime(g->node_y1(id)));
  }
}

TEST_CASE("path-integral reconstruction") {
  auto g = elliptic::build_grid(8.0, 24, 1.5);
  const auto setup = make_setup(kBgPlus, kAir, g);
  const double s = setup.stretch;

  SECTION("constant field integrates to zero") {
    const ScalarField c(g, 0.37);
    const ScalarField dv2 = reconstruct_v2(setup, c);
    CHECK(dv2.sup_norm() <= 1e-12);
  }

  SECTION("linear-in-psi field integrates to the horizontal coordinate") {
    // dv1 = psi = z2/s gives dv2 = y1 exactly for the trapezoid rule
    auto dv1 = ScalarField::sample(g, [&](double, double b) { return b / s; });
    const ScalarField dv2 = reconstruct_v2(setup, dv1);
    for (int id = 0; id < static_cast<int>(g->size()); ++id)
      CHECK(dv2[id] == Catch::Approx(g->node_y1(id)).margin(1e-10));
  }

  SECTION("entrance values vanish identically") {
    auto dv1 = ScalarField::sample(g, [](double a, double b) { return std::sin(a) * b; });
    const ScalarField dv2 = reconstruct_v2(setup, dv1);
    for (int j = 0; j < g->ny(); ++j)
      if (g->kept(0, j)) CHECK(dv2[g->node(0, j)] == 0.0);
  }

  SECTION("discrete curl vanishes to stencil order") {
    auto smooth = [](double a, double b) { return std::sin(0.4 * a) * std::exp(-0.3 * b); };
    double prev = 0.0;
    for (int n : {24, 48}) {
      auto gg = elliptic::build_grid(8.0, n, 1.5);
      const auto su = make_setup(kBgPlus, kAir, gg);
      auto dv1 = ScalarField::sample(gg, smooth);
      const ScalarField dv2 = reconstruct_v2(su, dv1);
      double curl = 0.0;
      for (int id = 0; id < static_cast<int>(gg->size()); ++id) {
        if (gg->region(id) != Region::Interior) continue;
        const auto [i, j] = gg->ij(id);
        curl = std::max(curl, std::abs(dv2.d1(i, j) - su.stretch * dv1.d2(i, j)));
      }
      if (n == 48) CHECK(curl < 0.35 * prev);  // at least ~1.5th order
      prev = curl;
    }
  }
}

TEST_CASE("quadrant solve on the reference boundary") {
  auto g = elliptic::build_grid(16.0, 48, 2.0);
  const auto setup = make_setup(kBgPlus, kAir, g);
  const auto bdry = reference_boundary(0.01, *g);
  const auto sol = solve_quadrant(setup, [&](double t) { return bdry.deriv(t); });

  SECTION("geometric contraction of the updates") {
    REQUIRE(sol.update_history.size() >= 3);
    for (std::size_t k = 2; k + 1 < sol.update_history.size(); ++k)
      CHECK(sol.update_history[k + 1] <= 0.5 * sol.update_history[k]);
    CHECK(sol.fixed_point_residual < 1e-10);
  }

  SECTION("slip and entrance conditions hold at the nodes") {
    for (int id : g->bottom_nodes()) CHECK(sol.v1[id] == bdry.deriv(g->node_y1(id)));
    for (int j = 0; j < g->ny(); ++j)
      if (g->kept(0, j))
        CHECK(sol.v2[g->node(0, j)] == Catch::Approx(1.0 / setup.inv.m1).margin(1e-12));
  }

  SECTION("streamline invariants are exact by construction") {
    for (int id = 0; id < static_cast<int>(g->size()); id += 7) {
      const auto st = gas::state_from_v(setup.inv, {sol.v1[id], sol.v2[id]}, setup.law);
      const double A = st.p / std::pow(st.rho, kAir.gamma);
      const double B = 0.5 * (st.u1 * st.u1 + st.u2 * st.u2) +
                       kAir.gamma * st.p / ((kAir.gamma - 1.0) * st.rho);
      CHECK(A == Catch::Approx(setup.inv.A).epsilon(1e-12));
      CHECK(B == Catch::Approx(setup.inv.B).epsilon(1e-12));
      CHECK(gas::sound_speed_mach(st, kAir).mach < 1.0);
    }
  }
}

TEST_CASE("linear response in the thickness parameter") {
  auto g = elliptic::build_grid(8.0, 32, 2.0);
  const auto setup = make_setup(kBgPlus, kAir, g);
  std::vector<double> ratios;
  for (double eps : {0.0025, 0.005, 0.01}) {
    const auto bdry = reference_boundary(eps, *g);
    const auto sol = solve_quadrant(setup, [&](double t) { return bdry.deriv(t); });
    double dev = 0.0;
    for (int id = 0; id < static_cast<int>(g->size()); ++id) {
      dev = std::max(dev, std::abs(sol.v1[id] - setup.v0.v1));
      dev = std::max(dev, std::abs(sol.v2[id] - setup.v0.v2));
    }
    ratios.push_back(dev / eps);
  }
  for (double r : ratios) {
    CHECK(r <= ratios[0] * 1.1);
    CHECK(r >= ratios[0] * 0.9);
  }
}

TEST_CASE("nonlinear residual converges under refinement") {
  // Measured on a fixed interior region: corner disks are excluded (limited
  // regularity at the edges), as are the first-rows wall strip, where the
  // flux residual carries the imprint of the leading-edge corner along the
  // boundary, and the outer band near the truncation arc. Far-field quality
  // is covered separately by the decay diagnostics.
  std::vector<double> residuals;
  std::vector<int> ns{32, 48, 64};
  for (int n : ns) {
    auto g = elliptic::build_grid(8.0, n, 2.0);
    const auto setup = make_setup(kBgPlus, kAir, g);
    const auto bdry = reference_boundary(0.01, *g);
    const auto sol = solve_quadrant(setup, [&](double t) { return bdry.deriv(t); });
    const ScalarField res = nonlinear_residual(setup, sol.v1, sol.v2);
    double sup = 0.0;
    for (int id = 0; id < static_cast<int>(g->size()); ++id) {
      if (g->region(id) != Region::Interior) continue;
      const double rO = g->radius(id);
      const double rT = std::hypot(g->node_y1(id) - 1.0, g->node_y2(id));
      if (rO < 0.1 || rT < 0.1 || g->node_y2(id) < 0.05 || rO > 0.8 * g->R()) continue;
      sup = std::max(sup, std::abs(res[id]));
    }
    residuals.push_back(sup);
  }
  const double p12 = std::log(residuals[0] / residuals[1]) / std::log(48.0 / 32.0);
  const double p23 = std::log(residuals[1] / residuals[2]) / std::log(64.0 / 48.0);
  INFO("residuals " << residuals[0] << " " << residuals[1] << " " << residuals[2] << " orders "
                    << p12 << " " << p23);
  CHECK(0.5 * (p12 + p23) >= 1.8);
}

TEST_CASE("physical reconstruction") {
  auto g = elliptic::build_grid(8.0, 24, 1.5);
  const auto setup = make_setup(kBgPlus, kAir, g);

  SECTION("background maps to uniformly spaced streamlines") {
    const auto bdry = reference_boundary(0.0, *g);
    const auto sol = solve_quadrant(setup, [&](double t) { return bdry.deriv(t); });
    const auto phys = to_physical(setup, sol, bdry, +1);
    for (int id = 0; id < static_cast<int>(g->size()); ++id) {
      const double psi = g->node_y2(id) / setup.stretch;
      CHECK(phys.x2[id] == Catch::Approx(setup.v0.v2 * psi).margin(1e-12));
      CHECK(phys.u2[id] == 0.0);
      CHECK(phys.rho[id] == Catch::Approx(kBgPlus.rho0).epsilon(1e-13));
    }
  }

  SECTION("bottom row lies on the boundary graph; columns conserve mass flux") {
    const auto bdry = reference_boundary(0.01, *g);
    const auto sol = solve_quadrant(setup, [&](double t) { return bdry.deriv(t); });
    for (int side : {+1, -1}) {
      const auto phys = to_physical(setup, sol, bdry, side);
      for (int id : g->bottom_nodes())
        CHECK(phys.x2[id] == Catch::Approx(bdry.value(g->node_y1(id))).margin(1e-15));
      // mass flux across each column equals the stream-function extent
      for (int i = 0; i < g->nx(); i += 5) {
        if (!g->kept(i, 2)) continue;
        int jtop = 0;
        while (g->kept(i, jtop + 1)) ++jtop;
        double flux = 0.0;
        for (int j = 0; j < jtop; ++j) {
          const int a = g->node(i, j), b = g->node(i, j + 1);
          flux += 0.5 * (phys.rho[a] * phys.u1[a] + phys.rho[b] * phys.u1[b]) *
                  (phys.x2[b] - phys.x2[a]);
        }
        const double extent = side * g->y2(jtop) / setup.stretch;
        CHECK(flux == Catch::Approx(extent).epsilon(5e-4));
      }
    }
  }
}

TEST_CASE("elliptic reconstruction cross-check agrees with the path integral") {
  auto g = elliptic::build_grid(8.0, 32, 2.0);
  const auto setup = make_setup(kBgPlus, kAir, g);
  const auto bdry = reference_boundary(0.01, *g);
  const auto sol = solve_quadrant(setup, [&](double t) { return bdry.deriv(t); });

  ScalarField dv2_ref = sol.v2;
  for (int id = 0; id < static_cast<int>(g->size()); ++id) dv2_ref[id] -= setup.v0.v2;

  const ScalarField dv2_ell = reconstruct_v2_elliptic(
      setup, sol.v1, sol.v2, dv2_ref, [&](double t) { return bdry.second(t); });
  // compare on the fixed interior region away from corners and the wall strip
  double diff = 0.0;
  for (int id = 0; id < static_cast<int>(g->size()); ++id) {
    const double rO = g->radius(id);
    const double rT = std::hypot(g->node_y1(id) - 1.0, g->node_y2(id));
    if (rO < 0.1 || rT < 0.1 || g->node_y2(id) < 0.05 || rO > 0.8 * g->R()) continue;
    diff = std::max(diff, std::abs(dv2_ell[id] - dv2_ref[id]));
  }
  INFO("route difference " << diff << " vs scale " << dv2_ref.sup_norm());
  CHECK(diff <= 0.05 * dv2_ref.sup_norm());
}
