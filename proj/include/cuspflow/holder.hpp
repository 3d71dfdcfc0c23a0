#pragma once

// Discrete weighted-Holder diagnostics: sup-norms of derivatives with corner
// weights (distance to a singular point set P) and far-field weights (powers
// of 1+|x|), plus a seeded random sample of Holder quotients. These are
// diagnostics, not exact norms: the quotient part samples a fixed budget of
// node pairs with separation in [h_min, 1].

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "cuspflow/errors.hpp"
#include "cuspflow/grid.hpp"
#include "cuspflow/stencils.hpp"

namespace cuspflow::geometry {

struct HolderSpec {
  double alpha = 0.3;   ///< Holder exponent, in (0, 1/2)
  double sigma = 0.0;   ///< corner weight exponent
  std::vector<std::array<double, 2>> singular_points;  ///< the set P
  int pair_budget = 10000;
  std::uint64_t seed = 12345;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("HolderSpec: alpha must lie in (0, 1/2)");
    if (pair_budget < 1) throw ConfigError("HolderSpec: pair budget must be positive");
  }
};

struct WeightedNormParts {
  double total = 0.0;
  double sup_part = 0.0;       ///< sum over derivative orders of weighted sups
  double quotient_part = 0.0;  ///< sampled weighted Holder quotient at order k
};

namespace detail {

inline double dist_to_set(double x, double y, const std::vector<std::array<double, 2>>& P) {
  if (P.empty()) return 1.0;  // no corner weight
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : P) d = std::min(d, std::hypot(x - p[0], y - p[1]));
  return std::min(d, 1.0);
}

}  // namespace detail

/// Weighted norm of a 2-D nodal field, derivative orders up to k (k <= 2),
/// far-field index tau. Deterministic for a fixed spec seed.
inline WeightedNormParts weighted_norm_parts(const elliptic::ScalarField& f, const HolderSpec& spec,
                                             int k, double tau) {
  spec.validate();
  if (k < 0 || k > 2) throw DomainError("weighted_norm: derivative order must be 0, 1, or 2");
  const auto& grid = f.grid();
  const int n = static_cast<int>(grid.size());

  // derivative tables per order; order 1 = {d1,d2}, order 2 = {d11,d12,d22}
  std::vector<std::vector<std::vector<double>>> tables(k + 1);
  for (int ord = 0; ord <= k; ++ord) {
    const int nderiv = (ord == 0) ? 1 : (ord == 1 ? 2 : 3);
    tables[ord].assign(nderiv, std::vector<double>(n));
    for (int id = 0; id < n; ++id) {
      const auto [i, j] = grid.ij(id);
      if (ord == 0) {
        tables[0][0][id] = f[id];
      } else if (ord == 1) {
        tables[1][0][id] = f.d1(i, j);
        tables[1][1][id] = f.d2(i, j);
      } else {
        tables[2][0][id] = f.d11(i, j);
        tables[2][1][id] = f.d12(i, j);
        tables[2][2][id] = f.d22(i, j);
      }
    }
  }

  WeightedNormParts out;
  std::vector<double> delta(n), Delta(n);
  for (int id = 0; id < n; ++id) {
    delta[id] = detail::dist_to_set(grid.node_y1(id), grid.node_y2(id), spec.singular_points);
    Delta[id] = grid.radius(id) + 1.0;
  }
  for (int ord = 0; ord <= k; ++ord) {
    const double dexp = std::max(double(ord) + spec.sigma, 0.0);
    double sup = 0.0;
    for (const auto& tab : tables[ord])
      for (int id = 0; id < n; ++id)
        sup = std::max(sup, std::pow(delta[id], dexp) * std::pow(Delta[id], tau + ord) *
                                std::abs(tab[id]));
    out.sup_part += sup;
  }

  // sampled Holder quotient at the top order
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const double dexp = std::max(double(k) + spec.alpha + spec.sigma, 0.0);
  double quot = 0.0;
  int accepted = 0;
  for (long attempt = 0; attempt < 40L * spec.pair_budget && accepted < spec.pair_budget;
       ++attempt) {
    const int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    const double dx = grid.node_y1(a) - grid.node_y1(b);
    const double dy = grid.node_y2(a) - grid.node_y2(b);
    const double sep = std::hypot(dx, dy);
    if (sep < grid.h_min() || sep > 1.0) continue;
    ++accepted;
    const double wd = std::pow(std::min(delta[a], delta[b]), dexp);
    const double wD = std::pow(std::min(Delta[a], Delta[b]), tau + k + spec.alpha);
    for (const auto& tab : tables[k])
      quot = std::max(quot, wd * wD * std::abs(tab[a] - tab[b]) / std::pow(sep, spec.alpha));
  }
  out.quotient_part = quot;
  out.total = out.sup_part + out.quotient_part;
  return out;
}

inline double weighted_norm(const elliptic::ScalarField& f, const HolderSpec& spec, int k,
                            double tau) {
  return weighted_norm_parts(f, spec, k, tau).total;
}

/// One-dimensional variant for sampled functions of t (e.g. slip-line data).
/// Singular points use their first coordinate.
inline WeightedNormParts weighted_norm_parts_1d(const std::vector<double>& t,
                                                const std::vector<double>& values,
                                                const HolderSpec& spec, int k, double tau) {
  spec.validate();
  if (k < 0 || k > 2) throw DomainError("weighted_norm_1d: derivative order must be 0, 1, or 2");
  const int n = static_cast<int>(t.size());
  if (n < 3 || values.size() != t.size())
    throw DomainError("weighted_norm_1d: need >= 3 samples with matching nodes");

  auto derivative = [&](const std::vector<double>& v) {
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) {
      const int a = std::clamp(i - 1, 0, n - 3);
      const auto w = stencils::deriv1_weights(t[a], t[a + 1], t[a + 2], t[i]);
      d[i] = w[0] * v[a] + w[1] * v[a + 1] + w[2] * v[a + 2];
    }
    return d;
  };

  std::vector<std::vector<double>> tables{values};
  for (int ord = 1; ord <= k; ++ord) tables.push_back(derivative(tables.back()));

  double h_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < n; ++i) h_min = std::min(h_min, t[i + 1] - t[i]);

  std::vector<double> delta(n), Delta(n);
  for (int i = 0; i < n; ++i) {
    delta[i] = detail::dist_to_set(t[i], 0.0, spec.singular_points);
    Delta[i] = std::abs(t[i]) + 1.0;
  }

  WeightedNormParts out;
  for (int ord = 0; ord <= k; ++ord) {
    const double dexp = std::max(double(ord) + spec.sigma, 0.0);
    double sup = 0.0;
    for (int i = 0; i < n; ++i)
      sup = std::max(sup, std::pow(delta[i], dexp) * std::pow(Delta[i], tau + ord) *
                              std::abs(tables[ord][i]));
    out.sup_part += sup;
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const double dexp = std::max(double(k) + spec.alpha + spec.sigma, 0.0);
  double quot = 0.0;
  int accepted = 0;
  for (long attempt = 0; attempt < 40L * spec.pair_budget && accepted < spec.pair_budget;
       ++attempt) {
    const int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    const double sep = std::abs(t[a] - t[b]);
    if (sep < h_min || sep > 1.0) continue;
    ++accepted;
    const double wd = std::pow(std::min(delta[a], delta[b]), dexp);
    const double wD = std::pow(std::min(Delta[a], Delta[b]), tau + k + spec.alpha);
    quot = std::max(quot, wd * wD * std::abs(tables[k][a] - tables[k][b]) / std::pow(sep, spec.alpha));
  }
  out.quotient_part = quot;
  out.total = out.sup_part + out.quotient_part;
  return out;
}

inline double weighted_norm_1d(const std::vector<double>& t, const std::vector<double>& values,
                               const HolderSpec& spec, int k, double tau) {
  return weighted_norm_parts_1d(t, values, spec, k, tau).total;
}

}  // namespace cuspflow::geometry
