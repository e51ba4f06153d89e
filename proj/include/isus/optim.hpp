#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace isus {

struct NelderMeadResult {
  std::vector<double> x;
  double fmin = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Derivative-free simplex minimizer. Objective may return +inf (or huge
// penalties) for infeasible points; the start must be feasible.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start,
                                    double initial_step = 0.1,
                                    double ftol = 1e-10,
                                    std::size_t max_iter = 2000) {
  const std::size_t n = start.size();
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  NelderMeadResult res;
  std::vector<std::vector<double>> pts(n + 1, start);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double step = initial_step * std::max(1.0, std::fabs(start[i]));
    pts[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= n; ++i) {
    fv[i] = f(pts[i]);
    ++res.evaluations;
  }

  std::vector<std::size_t> order(n + 1);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];

    if (std::isfinite(fv[best]) && std::isfinite(fv[worst]) &&
        std::fabs(fv[worst] - fv[best]) < ftol * (std::fabs(fv[best]) + 1e-12) + ftol) {
      res.converged = true;
      res.x = pts[best];
      res.fmin = fv[best];
      return res;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto combine = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j)
        p[j] = centroid[j] + t * (pts[worst][j] - centroid[j]);
      return p;
    };

    std::vector<double> xr = combine(-alpha);
    double fr = f(xr);
    ++res.evaluations;
    if (fr < fv[order[0]]) {
      std::vector<double> xe = combine(-gamma);
      double fe = f(xe);
      ++res.evaluations;
      if (fe < fr) {
        pts[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = std::move(xr);
      fv[worst] = fr;
      continue;
    }
    std::vector<double> xc = combine(fr < fv[worst] ? -rho : rho);
    double fc = f(xc);
    ++res.evaluations;
    if (fc < std::min(fr, fv[worst])) {
      pts[worst] = std::move(xc);
      fv[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j)
        pts[i][j] = pts[best][j] + sigma * (pts[i][j] - pts[best][j]);
      fv[i] = f(pts[i]);
      ++res.evaluations;
    }
  }
  for (std::size_t i = 0; i <= n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  res.x = pts[order[0]];
  res.fmin = fv[order[0]];
  return res;
}

}  // namespace isus
