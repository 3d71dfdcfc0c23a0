#pragma once

// Log-log least-squares fits over shell-averaged magnitudes; used for the
// decay, corner-exponent and growth diagnostics.

#include <cmath>
#include <vector>

namespace cuspflow::fitting {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n_points = 0;
  bool defined = false;  ///< false when the data was degenerate (e.g. zero field)
};

/// Least squares of log(y) against log(x); samples with y <= floor are dropped.
inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                            double floor = 1e-14) {
  LogLogFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && y[i] > floor) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const int n = static_cast<int>(lx.size());
  fit.n_points = n;
  if (n < 4) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
    syy += ly[i] * ly[i];
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (int i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - ybar) * (ly[i] - ybar);
  }
  fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  fit.defined = true;
  return fit;
}

/// Averages |val| over log-spaced radial shells on [rmin, rmax] and fits the
/// shell means against the shell centers. Suppresses angular oscillation.
inline LogLogFit shell_fit(const std::vector<double>& r, const std::vector<double>& val,
                           double rmin, double rmax, int nbins = 10, double floor = 1e-14) {
  LogLogFit bad;
  if (!(rmax > rmin) || nbins < 4 || r.size() != val.size()) return bad;
  const double ratio = std::log(rmax / rmin);
  std::vector<double> sum(nbins, 0.0);
  std::vector<int> cnt(nbins, 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < rmin || r[i] > rmax) continue;
    int b = static_cast<int>(std::log(r[i] / rmin) / ratio * nbins);
    if (b == nbins) b = nbins - 1;
    if (b < 0 || b >= nbins) continue;
    sum[b] += std::abs(val[i]);
    ++cnt[b];
  }
  std::vector<double> centers, means;
  for (int b = 0; b < nbins; ++b) {
    if (cnt[b] == 0) continue;
    centers.push_back(rmin * std::exp((b + 0.5) * ratio / nbins));
    means.push_back(sum[b] / cnt[b]);
  }
  return fit_loglog(centers, means, floor);
}

}  // namespace cuspflow::fitting
