#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isus/rng.hpp"
#include "isus/special.hpp"

namespace isus {

// The seven candidate families. Maxwell and Levy carry a location shift so
// every family can be fit to data living away from the origin; Lognormal is
// parameterized by the underlying Gaussian (mu, sigma).
enum class FamilyTag {
  Normal,
  Lognormal,
  Gamma,
  Logistic,
  InverseGaussian,
  Maxwell,
  Levy,
};

inline constexpr std::array<FamilyTag, 7> kAllFamilies = {
    FamilyTag::Normal,   FamilyTag::Lognormal,       FamilyTag::Gamma,
    FamilyTag::Logistic, FamilyTag::InverseGaussian, FamilyTag::Maxwell,
    FamilyTag::Levy,
};

inline std::string_view family_name(FamilyTag f) {
  switch (f) {
    case FamilyTag::Normal: return "normal";
    case FamilyTag::Lognormal: return "lognormal";
    case FamilyTag::Gamma: return "gamma";
    case FamilyTag::Logistic: return "logistic";
    case FamilyTag::InverseGaussian: return "inverse_gaussian";
    case FamilyTag::Maxwell: return "maxwell";
    case FamilyTag::Levy: return "levy";
  }
  throw std::logic_error("family_name: bad tag");
}

inline FamilyTag family_from_name(std::string_view name) {
  for (FamilyTag f : kAllFamilies)
    if (family_name(f) == name) return f;
  throw std::invalid_argument("unknown family: " + std::string(name));
}

// Every family has exactly two parameters.
//   normal:            (mu, sigma>0)           support: R
//   lognormal:         (mu_log, sigma_log>0)   support: x > 0
//   gamma:             (shape>0, scale>0)      support: x > 0
//   logistic:          (loc, s>0)              support: R
//   inverse_gaussian:  (mu>0, lambda>0)        support: x > 0
//   maxwell:           (loc, scale>0)          support: x > loc
//   levy:              (loc, scale>0)          support: x > loc
inline constexpr std::size_t param_count(FamilyTag) { return 2; }

struct DistributionSpec {
  FamilyTag family;
  std::array<double, 2> theta;
};

struct Dataset {
  std::vector<double> values;
  std::string name;

  std::size_t size() const { return values.size(); }
};

// Validity of theta in the family's parameter domain. Scale/shape parameters
// must be strictly positive and finite.
inline bool theta_valid(FamilyTag f, const std::array<double, 2>& t) {
  if (!std::isfinite(t[0]) || !std::isfinite(t[1])) return false;
  switch (f) {
    case FamilyTag::Normal:
    case FamilyTag::Lognormal:
    case FamilyTag::Logistic:
    case FamilyTag::Maxwell:
    case FamilyTag::Levy:
      return t[1] > 0.0;
    case FamilyTag::Gamma:
    case FamilyTag::InverseGaussian:
      return t[0] > 0.0 && t[1] > 0.0;
  }
  return false;
}

inline void check_theta(const DistributionSpec& spec) {
  if (!theta_valid(spec.family, spec.theta))
    throw std::domain_error(std::string("invalid parameters for family ") +
                            std::string(family_name(spec.family)));
}

// ln p(x | theta). Returns -inf outside the support, never throws for x.
inline double log_pdf(const DistributionSpec& spec, double x) {
  const double p0 = spec.theta[0];
  const double p1 = spec.theta[1];
  switch (spec.family) {
    case FamilyTag::Normal: {
      double z = (x - p0) / p1;
      return -0.5 * kLog2Pi - std::log(p1) - 0.5 * z * z;
    }
    case FamilyTag::Lognormal: {
      if (x <= 0.0) return -kInf;
      double lx = std::log(x);
      double z = (lx - p0) / p1;
      return -lx - std::log(p1) - 0.5 * kLog2Pi - 0.5 * z * z;
    }
    case FamilyTag::Gamma: {
      if (x <= 0.0) return -kInf;
      return (p0 - 1.0) * std::log(x) - x / p1 - std::lgamma(p0) - p0 * std::log(p1);
    }
    case FamilyTag::Logistic: {
      double z = std::fabs((x - p0) / p1);
      return -z - std::log(p1) - 2.0 * std::log1p(std::exp(-z));
    }
    case FamilyTag::InverseGaussian: {
      if (x <= 0.0) return -kInf;
      double dx = x - p0;
      return 0.5 * (std::log(p1) - kLog2Pi - 3.0 * std::log(x)) -
             p1 * dx * dx / (2.0 * p0 * p0 * x);
    }
    case FamilyTag::Maxwell: {
      double y = x - p0;
      if (y <= 0.0) return -kInf;
      return 0.5 * std::log(2.0 / M_PI) + 2.0 * std::log(y) -
             y * y / (2.0 * p1 * p1) - 3.0 * std::log(p1);
    }
    case FamilyTag::Levy: {
      double y = x - p0;
      if (y <= 0.0) return -kInf;
      return 0.5 * (std::log(p1) - kLog2Pi) - 1.5 * std::log(y) - p1 / (2.0 * y);
    }
  }
  return -kInf;
}

inline double pdf(const DistributionSpec& spec, double x) {
  return std::exp(log_pdf(spec, x));
}

inline double cdf(const DistributionSpec& spec, double x) {
  const double p0 = spec.theta[0];
  const double p1 = spec.theta[1];
  switch (spec.family) {
    case FamilyTag::Normal:
      return normal_cdf((x - p0) / p1);
    case FamilyTag::Lognormal:
      if (x <= 0.0) return 0.0;
      return normal_cdf((std::log(x) - p0) / p1);
    case FamilyTag::Gamma:
      if (x <= 0.0) return 0.0;
      return gamma_p(p0, x / p1);
    case FamilyTag::Logistic:
      return 1.0 / (1.0 + std::exp(-(x - p0) / p1));
    case FamilyTag::InverseGaussian: {
      if (x <= 0.0) return 0.0;
      double s = std::sqrt(p1 / x);
      return normal_cdf(s * (x / p0 - 1.0)) +
             std::exp(2.0 * p1 / p0 + log_normal_cdf_tail(-s * (x / p0 + 1.0)));
    }
    case FamilyTag::Maxwell: {
      double z = (x - p0) / p1;
      if (z <= 0.0) return 0.0;
      return std::erf(z / std::sqrt(2.0)) -
             z * std::sqrt(2.0 / M_PI) * std::exp(-0.5 * z * z);
    }
    case FamilyTag::Levy: {
      double y = x - p0;
      if (y <= 0.0) return 0.0;
      return std::erfc(std::sqrt(p1 / (2.0 * y)));
    }
  }
  return 0.0;
}

// Lower edge of the support (-inf for whole-line families).
inline double support_lower(const DistributionSpec& spec) {
  switch (spec.family) {
    case FamilyTag::Normal:
    case FamilyTag::Logistic:
      return -kInf;
    case FamilyTag::Lognormal:
    case FamilyTag::Gamma:
    case FamilyTag::InverseGaussian:
      return 0.0;
    case FamilyTag::Maxwell:
    case FamilyTag::Levy:
      return spec.theta[0];
  }
  return -kInf;
}

namespace detail {

inline double sample_standard_normal(Rng& rng) {
  // Inverse transform keeps the draw count per variate fixed at one.
  double u = rng.uniform();
  while (u <= 0.0) u = rng.uniform();
  return normal_quantile(u);
}

// Marsaglia-Tsang for shape >= 1; boost by u^{1/shape} below 1.
inline double sample_standard_gamma(double shape, Rng& rng) {
  if (shape < 1.0) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    return sample_standard_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z = sample_standard_normal(rng);
    double v = 1.0 + c * z;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace detail

inline double sample_one(const DistributionSpec& spec, Rng& rng) {
  const double p0 = spec.theta[0];
  const double p1 = spec.theta[1];
  switch (spec.family) {
    case FamilyTag::Normal:
      return p0 + p1 * detail::sample_standard_normal(rng);
    case FamilyTag::Lognormal:
      return std::exp(p0 + p1 * detail::sample_standard_normal(rng));
    case FamilyTag::Gamma:
      return p1 * detail::sample_standard_gamma(p0, rng);
    case FamilyTag::Logistic: {
      double u = rng.uniform();
      while (u <= 0.0 || u >= 1.0) u = rng.uniform();
      return p0 + p1 * std::log(u / (1.0 - u));
    }
    case FamilyTag::InverseGaussian: {
      // Michael-Schucany-Haas transformation.
      double z = detail::sample_standard_normal(rng);
      double y = z * z;
      double x = p0 + p0 * p0 * y / (2.0 * p1) -
                 p0 / (2.0 * p1) * std::sqrt(4.0 * p0 * p1 * y + p0 * p0 * y * y);
      double u = rng.uniform();
      if (u <= p0 / (p0 + x)) return x;
      return p0 * p0 / x;
    }
    case FamilyTag::Maxwell: {
      double n1 = detail::sample_standard_normal(rng);
      double n2 = detail::sample_standard_normal(rng);
      double n3 = detail::sample_standard_normal(rng);
      return p0 + p1 * std::sqrt(n1 * n1 + n2 * n2 + n3 * n3);
    }
    case FamilyTag::Levy: {
      double u = rng.uniform();
      while (u <= 0.0 || u >= 1.0) u = rng.uniform();
      // F(x) = erfc(sqrt(c / 2(x-loc))); invert via the normal quantile.
      double t = normal_quantile(1.0 - u / 2.0) / std::sqrt(2.0);
      return p0 + p1 / (2.0 * t * t);
    }
  }
  throw std::logic_error("sample_one: bad tag");
}

inline std::vector<double> sample(const DistributionSpec& spec, std::size_t n, Rng& rng) {
  check_theta(spec);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_one(spec, rng));
  return out;
}

// Converts (mean, std) of a lognormal variable to the (mu, sigma) of the
// underlying Gaussian.
inline std::pair<double, double> moments_to_lognormal(double mean, double sd) {
  if (!(mean > 0.0) || !(sd > 0.0))
    throw std::domain_error("moments_to_lognormal: inputs must be positive");
  double c = sd / mean;
  double sigma2 = std::log1p(c * c);
  double sigma = std::sqrt(sigma2);
  double mu = std::log(mean) - 0.5 * sigma2;
  return {mu, sigma};
}

}  // namespace isus
