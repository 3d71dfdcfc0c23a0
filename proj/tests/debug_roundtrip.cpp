#include <cmath>
#include <cstdio>

#include "cuspflow/freeboundary.hpp"

using namespace cuspflow;
using namespace cuspflow::freeboundary;

int main() {
  const gas::GasLaw air{1.4};
  const gas::UniformState bgp{1.0, 0.5, 1.0}, bgm{0.8, 0.6, 1.0};
  auto grid = elliptic::build_grid(16.0, 64, 2.0);
  auto pb = make_problem(air, bgp, bgm, geometry::hermite_profile(0.5, 0.2, 1.0), grid);

  // compact direction
  std::vector<double> dw(pb.w_t.size(), 0.0);
  for (std::size_t k = 0; k < pb.w_t.size(); ++k) {
    const double u = (pb.w_t[k] - 2.5) / 1.2;
    if (std::abs(u) < 1.0) dw[k] = 0.02 * std::exp(1.0 - 1.0 / (1.0 - u * u));
  }
  dw[0] = 0.0;

  const auto base = eval_T(pb, 0.0, std::vector<double>(pb.w_t.size(), 0.0));
  const auto dp = eval_DT(pb, base.sols, 0.0, dw);
  const auto rec = invert_DT0(pb, dp.value);

  std::printf("  t       dw          rec         rec-dw\n");
  for (std::size_t k = 0; k < pb.w_t.size(); k += 4)
    std::printf("%7.3f  %+.4e  %+.4e  %+.4e\n", pb.w_t[k], dw[k], rec[k], rec[k] - dw[k]);

  // stage diagnostics: at the flat state, delta p / scale should equal the
  // stretched second component s*phi_z2; reconstruct phi on the plus side.
  // compare invert's first-pass u with s*phi.d2 everywhere
  const QuadrantGrid& g = *grid;
  // rebuild the plus-side potential directly (same as dT_side's internals)
  MixedBVP bvp = MixedBVP::flat(grid);
  const interp::MonotoneCubic dwi(pb.w_t, dw);
  auto dgf = [&](double t) {
    if (t <= 1.0) return 0.0;
    return dwi.integral_from_start(t);
  };
  const geometry::MollifiedExtension ext(dgf, {1.0, g.R()});
  for (int id = 0; id < (int)g.size(); ++id) {
    switch (g.region(id)) {
      case Region::Interior: break;
      case Region::H: bvp.kind[id] = RowKind::Dirichlet; bvp.bc_value[id] = 0.0; break;
      case Region::L: bvp.bc_value[id] = dgf(g.node_y1(id)); break;
      case Region::S: bvp.bc_value[id] = ext(g.node_y1(id), g.node_y2(id)); break;
    }
  }
  const ScalarField phi = elliptic::solve_mixed_bvp(bvp, 1e-12);

  // u from invert stage (i)
  MixedBVP first = MixedBVP::flat(grid);
  for (int id = 0; id < (int)g.size(); ++id) {
    switch (g.region(id)) {
      case Region::Interior: break;
      case Region::H: first.kind[id] = RowKind::Dirichlet; first.bc_value[id] = 0.0; break;
      case Region::S: first.bc_value[id] = 0.0; break;
      case Region::L: {
        const auto [i, jx] = g.ij(id);
        const double t = g.node_y1(id);
        if (t < 1.0 - 1e-14) {
          if (i > 0 && g.kept(i, 1) && g.kept(i, 2) && g.kept(i + 1, 0)) {
            first.kind[id] = RowKind::Directional;
            first.mu1[id] = 0.0;
            first.mu2[id] = 1.0;
            first.bc_value[id] = 0.0;
          }
        } else {
          std::size_t k = 0;
          while (k < pb.slip_ids.size() && pb.slip_ids[k] != id) ++k;
          first.bc_value[id] = (k < pb.slip_ids.size()) ? dp.value[k] / pb.flat.jump_scale : 0.0;
        }
        break;
      }
    }
  }
  const ScalarField u = elliptic::solve_mixed_bvp(first, 1e-12);

  double udiff = 0.0, uscale = 0.0;
  const double sp = pb.plus.stretch;
  for (int id = 0; id < (int)g.size(); ++id) {
    const auto [i, jx] = g.ij(id);
    if (g.region(id) != Region::Interior) continue;
    if (g.radius(id) > 0.6 * g.R()) continue;
    const double want = sp * phi.d2(i, jx);
    udiff = std::max(udiff, std::abs(u[id] - want));
    uscale = std::max(uscale, std::abs(want));
  }
  std::printf("stage (i): max |u - s*phi_z2| = %.3e vs scale %.3e (%.1f%%)\n", udiff, uscale,
              100.0 * udiff / uscale);

  // G vs phi.d1 on the entrance
  double gdiff = 0.0, gscale = 0.0;
  {
    const int ny = g.ny();
    std::vector<double> F(ny, 0.0), z2(ny, 0.0);
    int jtop = 0;
    for (int jx = 0; jx < ny && g.kept(0, jx); ++jx) {
      F[jx] = u.d1(0, jx);
      z2[jx] = g.y2(jx);
      jtop = jx;
    }
    std::vector<double> G(ny, 0.0);
    G[jtop] = 0.0;
    for (int jx = jtop - 1; jx >= 0; --jx)
      G[jx] = G[jx + 1] - 0.5 * (F[jx] + F[jx + 1]) * (z2[jx + 1] - z2[jx]);
    for (int jx = 1; jx <= jtop && z2[jx] < 8.0; ++jx) {
      const double want = phi.d1(0, jx);
      gdiff = std::max(gdiff, std::abs(G[jx] - want));
      gscale = std::max(gscale, std::abs(want));
    }
  }
  std::printf("stage (G): max |G - phi_z1(0,.)| = %.3e vs scale %.3e (%.1f%%)\n", gdiff, gscale,
              100.0 * gdiff / gscale);
  return 0;
}
