#include <cmath>
#include <cstdio>

#include "cuspflow/quadrant.hpp"

using namespace cuspflow;
using namespace cuspflow::quadrant;

int main() {
  const gas::GasLaw air{1.4};
  const gas::UniformState bg{1.0, 0.5, 1.0};
  const auto p = geometry::hermite_profile(0.5, 0.2, 1.0);
  const double eps = 0.01;

  for (int n : {24, 32, 48, 64, 96}) {
    auto g = elliptic::build_grid(8.0, n, 2.0);
    const auto setup = make_setup(bg, air, g);
    auto gprime = [&p, eps](double t) {
      if (t <= 1.0) return eps * p.zeta_d(+1, t);
      return eps * p.kstar * std::pow(t, -0.5);
    };
    const auto sol = solve_quadrant(setup, gprime);
    const ScalarField res = nonlinear_residual(setup, sol.v1, sol.v2);
    double sup = 0.0;
    double y1a = 0, y2a = 0;
    for (int id = 0; id < static_cast<int>(g->size()); ++id) {
      if (g->region(id) != Region::Interior) continue;
      const double rO = g->radius(id);
      const double rT = std::hypot(g->node_y1(id) - 1.0, g->node_y2(id));
      if (rO < 0.1 || rT < 0.1 || g->node_y2(id) < 0.05 || rO > 0.8 * g->R()) continue;
      if (std::abs(res[id]) > sup) {
        sup = std::abs(res[id]);
        y1a = g->node_y1(id);
        y2a = g->node_y2(id);
      }
    }
    std::printf("n=%3d sup=%.4e at (%.4f, %.4f)\n", n, sup, y1a, y2a);
  }
  return 0;
}
