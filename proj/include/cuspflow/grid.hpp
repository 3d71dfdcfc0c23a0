#pragma once

// Corner-graded tensor-product mesh on the truncated quarter disc
// {y1, y2 >= 0, |y| <= R}, and nodal scalar fields with difference stencils.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cuspflow/errors.hpp"
#include "cuspflow/stencils.hpp"

namespace cuspflow::elliptic {

enum class Region : std::uint8_t {
  Interior,  ///< full 3x3 neighborhood available
  H,         ///< entrance column y1 = 0 (oblique-condition rows)
  L,         ///< bottom row y2 = 0 (boundary-data rows)
  S          ///< far boundary: nodes adjacent to the truncation arc
};

namespace detail {

// Two-sided clustering map on [0,1]: identity at strength 1, progressively
// denser at both ends for strength > 1.
inline double cluster_both(double t, double strength) {
  if (strength == 1.0) return t;
  const double a = std::pow(t, strength);
  const double b = std::pow(1.0 - t, strength);
  return a / (a + b);
}

// Far-zone nodes on [1, R]: power-law stretch whose first spacing matches
// match_h so the composite axis has no spacing jump at the seam.
inline std::vector<double> far_axis(double R, int m, double match_h) {
  double p = std::log(match_h / (R - 1.0)) / std::log(1.0 / m);
  p = std::clamp(p, 1.0, 4.0);
  std::vector<double> out(m + 1);
  for (int k = 0; k <= m; ++k) out[k] = 1.0 + (R - 1.0) * std::pow(double(k) / m, p);
  out.back() = R;
  return out;
}

}  // namespace detail

class QuadrantGrid {
 public:
  QuadrantGrid(double R, int n_radial, double grading) : R_(R), n_radial_(n_radial), grading_(grading) {
    if (!(R > 4.0)) throw ConfigError("build_grid: truncation radius must exceed 4");
    if (n_radial < 16) throw ConfigError("build_grid: n_radial must be at least 16");
    if (!(grading >= 1.0 && grading <= 4.0)) throw ConfigError("build_grid: grading in [1,4]");

    const int na = std::max(8, n_radial / 2);
    y1_.resize(na + 1);
    for (int k = 0; k <= na; ++k) y1_[k] = detail::cluster_both(double(k) / na, grading);
    y1_.front() = 0.0;
    y1_[na] = 1.0;
    {
      auto far = detail::far_axis(R, n_radial, y1_[na] - y1_[na - 1]);
      y1_.insert(y1_.end(), far.begin() + 1, far.end());
    }
    i_unit_ = na;

    y2_.resize(na + 1);
    for (int k = 0; k <= na; ++k) y2_[k] = std::pow(double(k) / na, grading);
    y2_.front() = 0.0;
    y2_[na] = 1.0;
    {
      auto far = detail::far_axis(R, n_radial, y2_[na] - y2_[na - 1]);
      y2_.insert(y2_.end(), far.begin() + 1, far.end());
    }

    h_min_ = R;
    for (std::size_t i = 0; i + 1 < y1_.size(); ++i) h_min_ = std::min(h_min_, y1_[i + 1] - y1_[i]);
    for (std::size_t j = 0; j + 1 < y2_.size(); ++j) h_min_ = std::min(h_min_, y2_[j + 1] - y2_[j]);

    build_nodes();
  }

  double R() const { return R_; }
  int n_radial() const { return n_radial_; }
  double grading() const { return grading_; }
  int nx() const { return static_cast<int>(y1_.size()); }
  int ny() const { return static_cast<int>(y2_.size()); }
  double y1(int i) const { return y1_[i]; }
  double y2(int j) const { return y2_[j]; }
  const std::vector<double>& y1() const { return y1_; }
  const std::vector<double>& y2() const { return y2_; }
  double h_min() const { return h_min_; }
  /// Index into the y1 axis of the trailing-edge abscissa (y1 == 1).
  int i_unit() const { return i_unit_; }

  std::size_t size() const { return nodes_.size(); }
  int node(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx() || j >= ny()) return -1;
    return idx_[static_cast<std::size_t>(j) * nx() + i];
  }
  bool kept(int i, int j) const { return node(i, j) >= 0; }
  std::pair<int, int> ij(int id) const { return nodes_[id]; }
  Region region(int id) const { return region_[id]; }
  double node_y1(int id) const { return y1_[nodes_[id].first]; }
  double node_y2(int id) const { return y2_[nodes_[id].second]; }
  double radius(int id) const { return std::hypot(node_y1(id), node_y2(id)); }

  /// Bottom-row node ids (j = 0) ordered by increasing y1.
  std::vector<int> bottom_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < nx(); ++i)
      if (kept(i, 0)) out.push_back(node(i, 0));
    return out;
  }

 private:
  void build_nodes() {
    const int NX = nx(), NY = ny();
    idx_.assign(static_cast<std::size_t>(NX) * NY, -1);
    const double r2max = R_ * R_ * (1.0 + 1e-14);
    auto inside = [&](int i, int j) {
      return i >= 0 && j >= 0 && i < NX && j < NY && y1_[i] * y1_[i] + y2_[j] * y2_[j] <= r2max;
    };
    for (int j = 0; j < NY; ++j)
      for (int i = 0; i < NX; ++i)
        if (inside(i, j)) {
          idx_[static_cast<std::size_t>(j) * NX + i] = static_cast<int>(nodes_.size());
          nodes_.emplace_back(i, j);
        }
    region_.resize(nodes_.size());
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
      const auto [i, j] = nodes_[id];
      Region reg;
      if (j == 0) {
        reg = Region::L;
      } else if (i == 0) {
        reg = (inside(1, j) && inside(2, j) && inside(0, j + 1)) ? Region::H : Region::S;
      } else {
        bool full = true;
        for (int dj = -1; dj <= 1 && full; ++dj)
          for (int di = -1; di <= 1 && full; ++di)
            if (!inside(i + di, j + dj)) full = false;
        reg = full ? Region::Interior : Region::S;
      }
      region_[id] = reg;
    }
  }

  double R_;
  int n_radial_;
  double grading_;
  std::vector<double> y1_, y2_;
  std::vector<int> idx_;
  std::vector<std::pair<int, int>> nodes_;
  std::vector<Region> region_;
  double h_min_ = 0.0;
  int i_unit_ = 0;
};

inline std::shared_ptr<const QuadrantGrid> build_grid(double R, int n_radial, double grading) {
  return std::make_shared<const QuadrantGrid>(R, n_radial, grading);
}

/// Nodal scalar field with best-available difference stencils of order <= 2.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const QuadrantGrid> grid, double fill = 0.0)
      : grid_(std::move(grid)), values_(grid_->size(), fill) {}

  static ScalarField sample(std::shared_ptr<const QuadrantGrid> grid,
                            const std::function<double(double, double)>& fn) {
    ScalarField f(grid);
    for (std::size_t id = 0; id < grid->size(); ++id)
      f.values_[id] = fn(grid->node_y1(static_cast<int>(id)), grid->node_y2(static_cast<int>(id)));
    return f;
  }

  const QuadrantGrid& grid() const { return *grid_; }
  std::shared_ptr<const QuadrantGrid> grid_ptr() const { return grid_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int id) const { return values_[id]; }
  double& operator[](int id) { return values_[id]; }
  double at(int i, int j) const { return values_[must_node(i, j)]; }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Bilinear interpolation at an arbitrary point; all four cell corners must
  /// be inside the grid.
  double interpolate(double a, double b) const {
    const auto& x = grid_->y1();
    const auto& y = grid_->y2();
    if (a < x.front() || a > x.back() || b < y.front() || b > y.back())
      throw DomainError("ScalarField::interpolate: point outside the axis range");
    const int i = bracket(x, a);
    const int j = bracket(y, b);
    const double tx = (a - x[i]) / (x[i + 1] - x[i]);
    const double ty = (b - y[j]) / (y[j + 1] - y[j]);
    const double f00 = at(i, j), f10 = at(i + 1, j), f01 = at(i, j + 1), f11 = at(i + 1, j + 1);
    return (1 - tx) * (1 - ty) * f00 + tx * (1 - ty) * f10 + (1 - tx) * ty * f01 + tx * ty * f11;
  }

  /// d/dy1 at node (i,j); centered when both neighbors exist, one-sided otherwise.
  double d1(int i, int j) const { return axis_deriv1(i, j, /*along_y1=*/true); }
  double d2(int i, int j) const { return axis_deriv1(i, j, /*along_y1=*/false); }
  double d11(int i, int j) const { return axis_deriv2(i, j, true); }
  double d22(int i, int j) const { return axis_deriv2(i, j, false); }
  /// Mixed derivative: y1-stencil applied to numerically evaluated d2.
  double d12(int i, int j) const {
    int ia, ib, ic;
    const int cnt = pick_triple(i, j, true, ia, ib, ic);
    if (cnt == 3) {
      const auto w =
          stencils::deriv1_weights(grid_->y1(ia), grid_->y1(ib), grid_->y1(ic), grid_->y1(i));
      return w[0] * d2(ia, j) + w[1] * d2(ib, j) + w[2] * d2(ic, j);
    }
    if (cnt == 2) return (d2(ib, j) - d2(ia, j)) / (grid_->y1(ib) - grid_->y1(ia));
    return 0.0;
  }

 private:
  static int bracket(const std::vector<double>& ax, double t) {
    int lo = 0, hi = static_cast<int>(ax.size()) - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (ax[mid] <= t ? lo : hi) = mid;
    }
    return lo;
  }

  int must_node(int i, int j) const {
    const int id = grid_->node(i, j);
    if (id < 0) throw DomainError("ScalarField: node (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") not in grid");
    return id;
  }

  // Chooses up to three collinear kept nodes bracketing (i,j) along one axis,
  // preferring the centered triple. Returns how many are available; arc-fringe
  // nodes may only support a 2-point (or no) stencil.
  int pick_triple(int i, int j, bool along_y1, int& a, int& b, int& c) const {
    auto ok = [&](int k) { return along_y1 ? grid_->kept(k, j) : grid_->kept(i, k); };
    const int p = along_y1 ? i : j;
    if (ok(p - 1) && ok(p + 1)) {
      a = p - 1; b = p; c = p + 1;
      return 3;
    }
    if (ok(p + 1) && ok(p + 2)) {
      a = p; b = p + 1; c = p + 2;
      return 3;
    }
    if (ok(p - 1) && ok(p - 2)) {
      a = p - 2; b = p - 1; c = p;
      return 3;
    }
    if (ok(p + 1)) {
      a = p; b = p + 1;
      return 2;
    }
    if (ok(p - 1)) {
      a = p - 1; b = p;
      return 2;
    }
    return 1;
  }

  double axis_deriv1(int i, int j, bool along_y1) const {
    int a, b, c;
    const int cnt = pick_triple(i, j, along_y1, a, b, c);
    const auto& ax = along_y1 ? grid_->y1() : grid_->y2();
    if (cnt == 3) {
      const int p = along_y1 ? i : j;
      const auto w = stencils::deriv1_weights(ax[a], ax[b], ax[c], ax[p]);
      return w[0] * val_axis(a, i, j, along_y1) + w[1] * val_axis(b, i, j, along_y1) +
             w[2] * val_axis(c, i, j, along_y1);
    }
    if (cnt == 2)
      return (val_axis(b, i, j, along_y1) - val_axis(a, i, j, along_y1)) / (ax[b] - ax[a]);
    return 0.0;
  }

  double axis_deriv2(int i, int j, bool along_y1) const {
    int a, b, c;
    if (pick_triple(i, j, along_y1, a, b, c) != 3) return 0.0;
    const auto& ax = along_y1 ? grid_->y1() : grid_->y2();
    const auto w = stencils::deriv2_weights(ax[a], ax[b], ax[c]);
    return w[0] * val_axis(a, i, j, along_y1) + w[1] * val_axis(b, i, j, along_y1) +
           w[2] * val_axis(c, i, j, along_y1);
  }

  double val_axis(int k, int i, int j, bool along_y1) const {
    return along_y1 ? values_[must_node(k, j)] : values_[must_node(i, k)];
  }

  std::shared_ptr<const QuadrantGrid> grid_;
  std::vector<double> values_;
};

}  // namespace cuspflow::elliptic
