#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "isus/distributions.hpp"
#include "isus/optim.hpp"

namespace isus {

struct FitResult {
  std::array<double, 2> theta;
  double loglik;
};

inline double log_likelihood(const DistributionSpec& spec, const std::vector<double>& data) {
  double ll = 0.0;
  for (double x : data) {
    ll += log_pdf(spec, x);
    if (ll == -kInf) return -kInf;
  }
  return ll;
}

namespace detail {

struct SampleStats {
  double mean, var, sd, min, max;
};

inline SampleStats sample_stats(const std::vector<double>& v) {
  SampleStats s{};
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.var = ss / n;  // MLE (1/n) variance
  s.sd = std::sqrt(s.var);
  auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  s.min = *mn;
  s.max = *mx;
  return s;
}

// Numerical maximization over an unconstrained reparameterization, with a few
// scaled restarts around the method-of-moments seed.
inline std::optional<FitResult> fit_numeric(
    FamilyTag family, const std::vector<double>& data,
    const std::function<std::array<double, 2>(const std::vector<double>&)>& to_theta,
    const std::vector<std::vector<double>>& starts) {
  auto objective = [&](const std::vector<double>& u) {
    std::array<double, 2> theta = to_theta(u);
    if (!theta_valid(family, theta)) return 1e300;
    double ll = log_likelihood({family, theta}, data);
    if (!std::isfinite(ll)) return 1e300;
    return -ll;
  };

  std::optional<FitResult> best;
  for (const auto& s : starts) {
    if (objective(s) >= 1e300) continue;
    NelderMeadResult r = nelder_mead(objective, s, 0.1, 1e-12, 4000);
    if (r.fmin >= 1e300 || !std::isfinite(r.fmin)) continue;
    std::array<double, 2> theta = to_theta(r.x);
    if (!theta_valid(family, theta)) continue;
    if (!best || -r.fmin > best->loglik) best = FitResult{theta, -r.fmin};
  }
  return best;
}

}  // namespace detail

// Maximum-likelihood fit. Closed form for normal, lognormal and inverse
// Gaussian; multi-start Nelder-Mead otherwise. Returns nullopt when the
// family's support cannot accommodate the data or the fit degenerates.
inline std::optional<FitResult> fit_mle(FamilyTag family, const Dataset& data) {
  const std::vector<double>& v = data.values;
  if (v.size() < param_count(family) + 2) return std::nullopt;
  detail::SampleStats st = detail::sample_stats(v);
  if (!(st.sd > 0.0)) return std::nullopt;

  auto finish = [&](std::array<double, 2> theta) -> std::optional<FitResult> {
    if (!theta_valid(family, theta)) return std::nullopt;
    double ll = log_likelihood({family, theta}, v);
    if (!std::isfinite(ll)) return std::nullopt;
    return FitResult{theta, ll};
  };

  switch (family) {
    case FamilyTag::Normal:
      return finish({st.mean, st.sd});

    case FamilyTag::Lognormal: {
      if (st.min <= 0.0) return std::nullopt;
      std::vector<double> logs(v.size());
      std::transform(v.begin(), v.end(), logs.begin(), [](double x) { return std::log(x); });
      detail::SampleStats ls = detail::sample_stats(logs);
      if (!(ls.sd > 0.0)) return std::nullopt;
      return finish({ls.mean, ls.sd});
    }

    case FamilyTag::InverseGaussian: {
      if (st.min <= 0.0) return std::nullopt;
      double inv_sum = 0.0;
      for (double x : v) inv_sum += 1.0 / x - 1.0 / st.mean;
      if (!(inv_sum > 0.0)) return std::nullopt;
      return finish({st.mean, static_cast<double>(v.size()) / inv_sum});
    }

    case FamilyTag::Gamma: {
      if (st.min <= 0.0) return std::nullopt;
      double k0 = st.mean * st.mean / st.var;
      double th0 = st.var / st.mean;
      auto to_theta = [](const std::vector<double>& u) {
        return std::array<double, 2>{std::exp(u[0]), std::exp(u[1])};
      };
      std::vector<std::vector<double>> starts = {
          {std::log(k0), std::log(th0)},
          {std::log(k0 * 2.0), std::log(th0 * 0.5)},
          {std::log(std::max(k0 * 0.5, 0.1)), std::log(th0 * 2.0)}};
      return detail::fit_numeric(family, v, to_theta, starts);
    }

    case FamilyTag::Logistic: {
      double s0 = st.sd * std::sqrt(3.0) / M_PI;
      auto to_theta = [](const std::vector<double>& u) {
        return std::array<double, 2>{u[0], std::exp(u[1])};
      };
      std::vector<std::vector<double>> starts = {
          {st.mean, std::log(s0)},
          {st.mean + 0.2 * st.sd, std::log(s0 * 1.5)},
          {st.mean - 0.2 * st.sd, std::log(s0 * 0.7)}};
      return detail::fit_numeric(family, v, to_theta, starts);
    }

    case FamilyTag::Maxwell: {
      // loc = min - exp(u0) keeps the support below the smallest datum.
      double a0 = st.sd / std::sqrt(3.0 - 8.0 / M_PI);
      double loc0 = st.mean - 2.0 * a0 * std::sqrt(2.0 / M_PI);
      double gap0 = std::max(st.min - loc0, 1e-3 * std::max(st.sd, 1e-12));
      double xmin = st.min;
      auto to_theta = [xmin](const std::vector<double>& u) {
        return std::array<double, 2>{xmin - std::exp(u[0]), std::exp(u[1])};
      };
      std::vector<std::vector<double>> starts = {
          {std::log(gap0), std::log(a0)},
          {std::log(gap0 * 4.0), std::log(a0 * 1.5)},
          {std::log(gap0 * 0.25), std::log(a0 * 0.7)}};
      return detail::fit_numeric(family, v, to_theta, starts);
    }

    case FamilyTag::Levy: {
      double xmin = st.min;
      double gap0 = std::max(0.5 * (st.mean - st.min), 1e-3 * std::max(st.sd, 1e-12));
      auto profile_scale = [&](double loc) {
        double s = 0.0;
        for (double x : v) s += 1.0 / (x - loc);
        return static_cast<double>(v.size()) / s;
      };
      auto to_theta = [xmin](const std::vector<double>& u) {
        return std::array<double, 2>{xmin - std::exp(u[0]), std::exp(u[1])};
      };
      std::vector<std::vector<double>> starts;
      for (double f : {1.0, 4.0, 0.25}) {
        double loc = xmin - gap0 * f;
        starts.push_back({std::log(gap0 * f), std::log(profile_scale(loc))});
      }
      return detail::fit_numeric(family, v, to_theta, starts);
    }
  }
  return std::nullopt;
}

// Asymptotic standard errors from the observed information (finite-difference
// Hessian of the log-likelihood at the MLE). Falls back to sd/sqrt(n) when the
// information matrix is not positive definite.
inline std::array<double, 2> mle_asymptotic_std(FamilyTag family,
                                                const std::array<double, 2>& theta,
                                                const Dataset& data) {
  const std::vector<double>& v = data.values;
  detail::SampleStats st = detail::sample_stats(v);
  double fallback = st.sd / std::sqrt(static_cast<double>(v.size()));

  auto ll = [&](std::array<double, 2> t) -> double {
    if (!theta_valid(family, t)) return -kInf;
    return log_likelihood({family, t}, v);
  };
  std::array<double, 2> h{};
  for (int i = 0; i < 2; ++i) h[i] = 1e-4 * std::max(std::fabs(theta[i]), 1e-4);

  double f0 = ll(theta);
  std::array<std::array<double, 2>, 2> hess{};
  bool ok = std::isfinite(f0);
  for (int i = 0; i < 2 && ok; ++i) {
    for (int j = i; j < 2 && ok; ++j) {
      std::array<double, 2> tpp = theta, tpm = theta, tmp = theta, tmm = theta;
      tpp[i] += h[i]; tpp[j] += h[j];
      tpm[i] += h[i]; tpm[j] -= h[j];
      tmp[i] -= h[i]; tmp[j] += h[j];
      tmm[i] -= h[i]; tmm[j] -= h[j];
      double d = (ll(tpp) - ll(tpm) - ll(tmp) + ll(tmm)) / (4.0 * h[i] * h[j]);
      if (!std::isfinite(d)) ok = false;
      hess[i][j] = hess[j][i] = d;
    }
  }
  std::array<double, 2> out{fallback, fallback};
  if (ok) {
    double det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
    // Observed information is -hess; need it positive definite.
    if (hess[0][0] < 0.0 && det > 0.0) {
      out[0] = std::sqrt(-hess[1][1] / det);
      out[1] = std::sqrt(-hess[0][0] / det);
    }
  }
  return out;
}

}  // namespace isus
