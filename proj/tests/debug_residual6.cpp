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

  for (int n : {24, 48, 96}) {
    auto g = elliptic::build_grid(8.0, n, 2.0);
    const auto setup = make_setup(bg, air, g);
    auto gprime = [&p, eps](double t) {
      if (t <= 1.0) return eps * p.zeta_d(+1, t);
      return eps * p.kstar * std::pow(t, -0.5);
    };
    const auto sol = solve_quadrant(setup, gprime);
    const double s = setup.stretch;

    ScalarField n1(g), n2(g), dv1(g), dv2(g);
    for (int id = 0; id < static_cast<int>(g->size()); ++id) {
      const auto f = gas::flux_N(setup.inv, {sol.v1[id], sol.v2[id]}, setup.law);
      n1[id] = f.n1;
      n2[id] = f.n2;
      dv1[id] = sol.v1[id] - setup.v0.v1;
      dv2[id] = sol.v2[id] - setup.v0.v2;
    }
    // probe the first interior row at y1 ~ 0.66
    int ii = 0;
    for (int i = 0; i < g->nx(); ++i)
      if (std::abs(g->y1(i) - 0.66) < std::abs(g->y1(ii) - 0.66)) ii = i;
    const int j = 1;
    const int id = g->node(ii, j);
    const auto c = gas::coeff_a(setup.inv, {sol.v1[id], sol.v2[id]}, setup.law);
    const auto grad = gas::coeff_a_gradient(setup.inv, {sol.v1[id], sol.v2[id]}, setup.law);
    const double b1 = (grad.a11_v1 * sol.v1.d1(ii, j) + grad.a11_v2 * sol.v2.d1(ii, j)) / (s * s);
    const double b2 = (grad.a12_v1 * sol.v1.d1(ii, j) + grad.a12_v2 * sol.v2.d1(ii, j)) / s;
    const double scalar_res = (c.a11 / (s * s)) * dv1.d11(ii, j) + (c.a12 / s) * dv1.d12(ii, j) +
                              dv1.d22(ii, j) + b1 * dv1.d1(ii, j) + b2 * dv1.d2(ii, j);
    const double curl_res = dv2.d1(ii, j) - s * dv1.d2(ii, j);
    const auto jac = gas::flux_jacobian(setup.inv, {sol.v1[id], sol.v2[id]}, setup.law);
    const double lin_res = jac.n1_v1 * dv1.d1(ii, j) + jac.n1_v2 * dv2.d1(ii, j) +
                           s * (jac.n2_v1 * dv1.d2(ii, j) + jac.n2_v2 * dv2.d2(ii, j));
    const double full_res = n1.d1(ii, j) + s * n2.d2(ii, j);
    std::printf(
        "n=%3d y1=%.3f z2=%.5f | scalar %.3e curl %.3e lin %.3e full %.3e | dv2.d2 %.4e\n", n,
        g->y1(ii), g->y2(j), scalar_res, curl_res, lin_res, full_res, dv2.d2(ii, j));
    // also print dv2.d2 exact-from-equation value
    const double dv2_d2_eq = -(c.a11 / s) * dv1.d1(ii, j) - c.a12 * dv1.d2(ii, j);
    std::printf("      dv2.d2 from flux relation: %.4e\n", dv2_d2_eq);
  }
  return 0;
}
