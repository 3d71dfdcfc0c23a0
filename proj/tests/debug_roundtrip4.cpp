#include <cmath>
#include <cstdio>

#include "cuspflow/freeboundary.hpp"

using namespace cuspflow;
using namespace cuspflow::freeboundary;

int main() {
  const gas::GasLaw air{1.4};
  const gas::UniformState bgp{1.0, 0.5, 1.0}, bgm{0.8, 0.6, 1.0};
  for (int n : {48, 64, 96}) {
    auto grid = elliptic::build_grid(16.0, n, 2.0);
    auto pb = make_problem(air, bgp, bgm, geometry::hermite_profile(0.5, 0.2, 1.0), grid);
    const auto base = eval_T(pb, 0.0, std::vector<double>(pb.w_t.size(), 0.0));
    for (double hw : {1.2, 2.5}) {
      for (double c : {2.5, 4.0}) {
        std::vector<double> dw(pb.w_t.size(), 0.0);
        for (std::size_t k = 0; k < pb.w_t.size(); ++k) {
          const double u = (pb.w_t[k] - c) / hw;
          if (std::abs(u) < 1.0) dw[k] = 0.02 * std::exp(1.0 - 1.0 / (1.0 - u * u));
        }
        dw[0] = 0.0;
        const auto dp = eval_DT(pb, base.sols, 0.0, dw);
        const auto rec = invert_DT0(pb, dp.value);
        double err = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < dw.size(); ++k) {
          err = std::max(err, std::abs(rec[k] - dw[k]));
          scale = std::max(scale, std::abs(dw[k]));
        }
        std::printf("n=%3d hw=%.1f c=%.1f rel=%.3f%%\n", n, hw, c, 100.0 * err / scale);
      }
    }
  }
  return 0;
}
