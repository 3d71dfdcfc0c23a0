#include <cmath>
#include <cstdio>

#include "cuspflow/quadrant.hpp"

using namespace cuspflow;
using namespace cuspflow::quadrant;

int main() {
  const gas::GasLaw air{1.4};
  const gas::UniformState bg{1.0, 0.5, 1.0};
  const auto profile = geometry::hermite_profile(0.5, 0.2, 1.0);

  for (int n : {24, 48}) {
    auto g = elliptic::build_grid(8.0, n, 2.0);
    const auto setup = make_setup(bg, air, g);
    std::vector<double> t;
    for (int i = g->i_unit(); i < g->nx() && g->kept(i, 0); ++i) t.push_back(g->y1(i));
    std::vector<double> w(t.size());
    for (std::size_t k = 0; k < t.size(); ++k)
      w[k] = 0.01 * profile.kstar * std::min(1.0, std::pow(t[k], -0.5));
    const auto bdry =
        geometry::boundary_fn(profile, geometry::make_slip_line(0.01, profile, t, w), +1);
    const auto sol = solve_quadrant(setup, [&](double s) { return bdry.deriv(s); });
    const ScalarField res = nonlinear_residual(setup, sol.v1, sol.v2);
    double sup = 0.0;
    int arg = -1;
    for (int id = 0; id < static_cast<int>(g->size()); ++id) {
      if (g->region(id) != Region::Interior) continue;
      const double rO = g->radius(id);
      const double rT = std::hypot(g->node_y1(id) - 1.0, g->node_y2(id));
      if (rO < 0.1 || rT < 0.1) continue;
      if (std::abs(res[id]) > sup) {
        sup = std::abs(res[id]);
        arg = id;
      }
    }
    std::printf("n=%d sup=%.3e at (y1,y2)=(%.4f,%.4f) region sizes nx=%d ny=%d\n", n, sup,
                g->node_y1(arg), g->node_y2(arg), g->nx(), g->ny());
    // residual profile along a few probes
    for (double probe_r : {0.15, 0.3, 1.0, 3.0}) {
      double loc = 0.0;
      for (int id = 0; id < static_cast<int>(g->size()); ++id) {
        if (g->region(id) != Region::Interior) continue;
        const double rT = std::hypot(g->node_y1(id) - 1.0, g->node_y2(id));
        if (std::abs(rT - probe_r) < 0.3 * probe_r) loc = std::max(loc, std::abs(res[id]));
      }
      std::printf("   near rT=%.2f: %.3e\n", probe_r, loc);
    }
  }
  return 0;
}
