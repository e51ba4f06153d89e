#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isus/density.hpp"
#include "isus/distributions.hpp"
#include "isus/rng.hpp"
#include "isus/sus.hpp"

namespace isus {

inline double g_linear(const std::vector<double>& u, double beta) {
  return beta * std::sqrt(2.0) - (u[0] + u[1]);
}

// ---------------------------------------------------------------------------
// Plate buckling
// ---------------------------------------------------------------------------

struct PlateParams {
  double b = 24.0;       // width (in)
  double t = 0.5;        // thickness (in)
  double sigma0 = 34.0;  // yield strength (ksi)
  double E = 29000.0;    // elastic modulus (ksi)
  double delta0 = 0.35;  // initial deflection (in)
  double eta = 5.25;     // residual stress parameter
};

// Normalized buckling strength of an imperfect plate.
inline double plate_psi(const PlateParams& p) {
  double lambda = (p.b / p.t) * std::sqrt(p.sigma0 / p.E);
  if (!(lambda > 0.0)) throw std::domain_error("plate_psi: non-positive slenderness");
  return (2.1 / lambda - 0.9 / (lambda * lambda)) * (1.0 - 0.75 * p.delta0 / lambda) *
         (1.0 - 2.0 * p.eta * p.t / p.b);
}

// Reliability reduces to two variables: the shifted yield strength
// sigma0_hat (sigma0 = sigma0_hat + 34) and the elastic modulus; all other
// parameters stay at nominal. Failure: psi < 0.5.
inline double g_plate(const std::vector<double>& x) {
  PlateParams p;
  p.sigma0 = x[0] + 34.0;
  p.E = x[1];
  if (!(p.sigma0 > 0.0) || !(p.E > 0.0)) return 1e6;  // unphysical draw: deep safe region
  return plate_psi(p) - 0.5;
}

// ---------------------------------------------------------------------------
// Spectral-representation ground motion and the 2-DOF shear frame
// ---------------------------------------------------------------------------

struct GroundMotion {
  double dt = 0.02;
  std::vector<double> accel;
  double S0 = 0.0141;
  double omega_max = 35.5;
  double T = 1.0;
  std::uint64_t seed = 0;
};

// a(t) = sqrt(2) sum_k sqrt(2 S0 dw) cos(w_k t + phi_k), w_k = (k - 1/2) dw.
inline GroundMotion srm_ground_motion(double S0, double omega_max, double T, double dt,
                                      std::size_t n_freq, Rng& rng,
                                      std::uint64_t seed_label = 0) {
  if (!(dt > 0.0) || n_freq < 1) throw std::invalid_argument("srm_ground_motion: bad discretization");
  double steps_real = T / dt;
  std::size_t steps = static_cast<std::size_t>(std::round(steps_real));
  if (std::fabs(steps_real - static_cast<double>(steps)) > 1e-9)
    throw std::invalid_argument("srm_ground_motion: T/dt must be integral");

  GroundMotion gm;
  gm.dt = dt;
  gm.S0 = S0;
  gm.omega_max = omega_max;
  gm.T = T;
  gm.seed = seed_label;

  double dw = omega_max / static_cast<double>(n_freq);
  double amp = std::sqrt(2.0) * std::sqrt(2.0 * S0 * dw);
  std::vector<double> phase(n_freq);
  for (std::size_t k = 0; k < n_freq; ++k) phase[k] = rng.uniform(0.0, 2.0 * M_PI);

  gm.accel.resize(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    double t = static_cast<double>(i) * dt;
    double a = 0.0;
    for (std::size_t k = 0; k < n_freq; ++k) {
      double w = (static_cast<double>(k) + 0.5) * dw;
      a += amp * std::cos(w * t + phase[k]);
    }
    gm.accel[i] = a;
  }
  return gm;
}

struct FrameParams {
  double K1 = 1000.0;
  double K2 = 1000.0;
  double xi = 0.03;  // modal damping ratio, both modes
};

// Maximum absolute roof displacement of the 2-DOF shear building
// (m1 = m2 = 1, K = [[K1+K2, -K2], [-K2, K2]]) under base acceleration,
// integrated mode by mode with the average-acceleration Newmark scheme from
// rest.
inline double frame_umax(const FrameParams& p, const GroundMotion& gm) {
  if (!(p.K1 > 0.0 && p.K2 > 0.0)) throw std::domain_error("frame_umax: non-positive stiffness");
  if (!(p.xi > 0.0 && p.xi < 1.0) && p.xi != 0.0)
    throw std::domain_error("frame_umax: damping ratio outside [0,1)");

  // Symmetric 2x2 eigenproblem of K (M = I).
  double k11 = p.K1 + p.K2, k12 = -p.K2, k22 = p.K2;
  double tr = k11 + k22, det = k11 * k22 - k12 * k12;
  double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
  std::array<double, 2> w2 = {tr / 2.0 - disc, tr / 2.0 + disc};
  if (!(w2[0] > 0.0)) throw std::domain_error("frame_umax: stiffness matrix not positive definite");

  double umax = 0.0;
  std::array<std::array<double, 2>, 2> phi{};  // mass-normalized mode shapes
  for (int m = 0; m < 2; ++m) {
    double v0 = -k12, v1 = k11 - w2[m];
    double nrm = std::hypot(v0, v1);
    if (nrm == 0.0) {  // K diagonal
      v0 = (m == 0) ? 1.0 : 0.0;
      v1 = (m == 0) ? 0.0 : 1.0;
      nrm = 1.0;
    }
    phi[m] = {v0 / nrm, v1 / nrm};
  }

  const std::size_t steps = gm.accel.size();
  const double dt = gm.dt;
  std::array<std::vector<double>, 2> q_hist;
  for (int m = 0; m < 2; ++m) {
    double w = std::sqrt(w2[m]);
    double gamma_m = phi[m][0] + phi[m][1];  // participation factor, r = [1,1]
    double c = 2.0 * p.xi * w;
    double k = w2[m];
    // Newmark, average acceleration (gamma = 1/2, beta = 1/4).
    double q = 0.0, qd = 0.0;
    double qdd = steps ? (-gamma_m * gm.accel[0] - c * qd - k * q) : 0.0;
    double keff = k + 2.0 * c / dt + 4.0 / (dt * dt);
    q_hist[m].assign(steps, 0.0);
    if (steps) q_hist[m][0] = q;
    for (std::size_t i = 1; i < steps; ++i) {
      double f = -gamma_m * gm.accel[i];
      double rhs = f + (4.0 / (dt * dt) * q + 4.0 / dt * qd + qdd) +
                   c * (2.0 / dt * q + qd);
      double qn = rhs / keff;
      double qdn = 2.0 / dt * (qn - q) - qd;
      double qddn = 4.0 / (dt * dt) * (qn - q) - 4.0 / dt * qd - qdd;
      q = qn;
      qd = qdn;
      qdd = qddn;
      q_hist[m][i] = q;
    }
  }
  for (std::size_t i = 0; i < steps; ++i) {
    double roof = phi[0][1] * q_hist[0][i] + phi[1][1] * q_hist[1][i];
    umax = std::max(umax, std::fabs(roof));
  }
  return umax;
}

inline double g_frame(const std::vector<double>& x, const GroundMotion& gm) {
  if (!(x[0] > 0.0) || !(x[1] > 0.0)) return -1.0;  // unphysical stiffness: failed
  FrameParams p{x[0], x[1], std::clamp(x[2], 1e-6, 0.999)};
  return 0.022 - frame_umax(p, gm);
}

// ---------------------------------------------------------------------------
// Plain Monte Carlo oracle
// ---------------------------------------------------------------------------

struct McResult {
  double pf = 0.0;
  double cov = kInf;  // undefined (inf) when pf = 0
  std::size_t n = 0;
};

inline McResult mc_oracle(const PerformanceFn& g, const CandidateModel& truth, std::size_t n,
                          Rng& rng) {
  if (n < 1) throw std::invalid_argument("mc_oracle: n >= 1");
  std::size_t fails = 0;
  std::vector<double> x(truth.specs.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = sample_one(truth.specs[j], rng);
    if (g(x) <= 0.0) ++fails;
  }
  McResult r;
  r.n = n;
  r.pf = static_cast<double>(fails) / static_cast<double>(n);
  if (r.pf > 0.0) r.cov = std::sqrt((1.0 - r.pf) / (r.pf * static_cast<double>(n)));
  return r;
}

// ---------------------------------------------------------------------------
// Benchmark registry
// ---------------------------------------------------------------------------

struct Benchmark {
  std::string name;
  std::string description;
  std::vector<std::string> variable_names;
  PerformanceFn g;
  CandidateModel truth;
};

// Fixed ground-motion record used by the frame benchmark; single realization
// by construction, seed chosen once and kept.
inline const GroundMotion& frame_record() {
  static const GroundMotion gm = [] {
    const std::uint64_t seed = 3;
    Rng rng(seed, "ground-motion");
    return srm_ground_motion(0.0141, 35.5, 1.0, 0.02, 128, rng, seed);
  }();
  return gm;
}

inline DistributionSpec lognormal_from_moments(double mean, double sd) {
  auto [mu, sigma] = moments_to_lognormal(mean, sd);
  return {FamilyTag::Lognormal, {mu, sigma}};
}

inline Benchmark make_benchmark(const std::string& name) {
  if (name == "linear3") {
    Benchmark b;
    b.name = name;
    b.description = "g = 3*sqrt(2) - (u1 + u2), iid standard normal inputs";
    b.variable_names = {"u1", "u2"};
    b.g = [](const std::vector<double>& u) { return g_linear(u, 3.0); };
    b.truth.specs = {{FamilyTag::Normal, {0.0, 1.0}}, {FamilyTag::Normal, {0.0, 1.0}}};
    return b;
  }
  if (name == "plate") {
    Benchmark b;
    b.name = name;
    b.description = "plate buckling, psi < 0.5; variables (sigma0_hat, E)";
    b.variable_names = {"sigma0_hat", "E"};
    b.g = g_plate;
    b.truth.specs = {lognormal_from_moments(10.2, 5.4587),
                     {FamilyTag::Normal, {29000.0, 0.076 * 29000.0}}};
    return b;
  }
  if (name == "frame") {
    Benchmark b;
    b.name = name;
    b.description = "2-DOF shear frame, u_max >= 0.022 under a fixed SRM record";
    b.variable_names = {"K1", "K2", "xi"};
    b.g = [](const std::vector<double>& x) { return g_frame(x, frame_record()); };
    b.truth.specs = {lognormal_from_moments(1000.0, 200.0),
                     lognormal_from_moments(1000.0, 200.0),
                     lognormal_from_moments(0.03, 0.0045)};
    return b;
  }
  throw std::invalid_argument("unknown benchmark: " + name);
}

inline std::vector<std::string> benchmark_names() { return {"linear3", "plate", "frame"}; }

}  // namespace isus
