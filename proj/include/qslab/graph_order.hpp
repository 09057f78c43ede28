#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace qslab {

inline constexpr double series_tol = 1e-14;

inline void require_probability(double p) {
  if (!(p > 0 && p < 1)) throw ParameterError("p must lie in (0,1)");
}

// eta(p) = prod_{i>=1} (1 - (1-p)^i)
inline double eta_function(double p, double tol = series_tol) {
  if (!(p > 0) || p > 1) throw ParameterError("eta: p must lie in (0,1]");
  const double q = 1 - p;
  double prod = 1, qi = q;
  while (qi >= tol) {
    prod *= 1 - qi;
    qi *= q;
  }
  return prod;
}

inline double theta_sum(int kind, double z, double q, double tol = series_tol) {
  if (!(std::fabs(q) < 1)) throw ParameterError("theta: |q| < 1 required (series diverges)");
  if (kind == 2) {
    if (q == 0) return 0;
    double s = 0;
    for (long n = 0;; ++n) {
      double t = std::pow(q, static_cast<double>(n * (n + 1))) * std::cos(static_cast<double>(2 * n + 1) * z);
      s += t;
      if (std::fabs(std::pow(q, static_cast<double>(n * (n + 1)))) < tol) break;
    }
    return 2 * std::pow(q, 0.25) * s;
  }
  if (kind == 3) {
    double s = 1;
    for (long n = 1;; ++n) {
      double w = std::pow(q, static_cast<double>(n * n));
      s += 2 * w * std::cos(static_cast<double>(2 * n) * z);
      if (std::fabs(w) < tol) break;
    }
    return s;
  }
  throw ParameterError("theta kind must be 2 or 3");
}

// theta_2 as 2 q^{1/4} G cos z prod (1 + 2 q^{2n} cos 2z + q^{4n}), G = prod (1 - q^{2n})
inline double theta2_product(double z, double q, double tol = series_tol) {
  if (!(std::fabs(q) < 1)) throw ParameterError("theta: |q| < 1 required (series diverges)");
  if (q == 0) return 0;
  double G = 1, P = 1, q2n = q * q;
  while (std::fabs(q2n) >= tol * 1e-3) {
    G *= 1 - q2n;
    P *= 1 + 2 * q2n * std::cos(2 * z) + q2n * q2n;
    q2n *= q * q;
  }
  return 2 * std::pow(q, 0.25) * G * std::cos(z) * P;
}

inline double theta(int kind, double z, double q, double tol = series_tol) { return theta_sum(kind, z, q, tol); }

struct HeightEstimates {
  double p = 0, f = 0, h = 0, theta2_form = 0, theta3_bound = 0, crude_bound = 0;
};

inline double underestimate_increment(double p, double tol = series_tol) {
  require_probability(p);
  const double q = 1 - p;
  // T_j = prod_{i<j} p q^i / (1 - q^{i+2})
  double T = 1, qj = q, num = 0, den = 0;
  for (long j = 1;; ++j) {
    num += T * qj;
    den += T;
    const double qi = qj;  // q^j, used as the i = j factor below
    T *= p * qi / (1 - qi * q * q);
    qj *= q;
    if (T < tol * den) break;
  }
  return 1 - num / den;
}

inline double overestimate_increment(double p, double tol = series_tol) {
  require_probability(p);
  const double q = 1 - p;
  double s = 0;
  for (long j = 1;; ++j) {
    double t = std::pow(q, static_cast<double>(j * (j - 1)) / 2);
    s += t;
    if (t < tol) break;
  }
  return 1 / s;
}

inline HeightEstimates height_increments(double p, double tol = series_tol) {
  require_probability(p);
  if (!(tol > 0)) throw ParameterError("tol must be > 0");
  HeightEstimates e;
  e.p = p;
  const double q = 1 - p;
  e.f = underestimate_increment(p, tol);
  e.h = overestimate_increment(p, tol);
  e.theta2_form = 2 * std::pow(q, 0.125) / theta_sum(2, 0, std::sqrt(q), tol);
  if (std::fabs(e.theta2_form - e.h) > 1e-9) throw ConsistencyError("theta_2 form disagrees with the overestimate series");
  e.theta3_bound = 2 / (theta_sum(3, 0, q, tol) + 1);
  e.crude_bound = 1 / (2 - p);
  return e;
}

struct MuBound {
  double p = 0;
  double mu_lower = 0;
  double envelope_lower = 0;   // sum ln(k) p q^{k-1}
  double envelope_middle = 0;  // (1-kappa) ln((1/p - kappa)/(1-kappa))
  double envelope_upper = 0;   // ln(1/p)
};

inline MuBound mu_lower_bound(double p) {
  require_probability(p);
  MuBound m;
  m.p = p;
  const double h = overestimate_increment(p);
  m.mu_lower = -std::log2(h) * std::log(2.0) / 2;
  const double q = 1 - p;
  double s = 0, w = p;
  for (long k = 1;; ++k) {
    s += std::log(static_cast<double>(k)) * w;
    w *= q;
    if (w * std::log(static_cast<double>(k + 1)) < series_tol && k > 1) break;
  }
  m.envelope_lower = s;
  const double kappa = eta_function(p);
  m.envelope_middle = (1 - kappa) * std::log((1 / p - kappa) / (1 - kappa));
  m.envelope_upper = std::log(1 / p);
  return m;
}

struct ChainRates {
  double under_rate = 0, over_rate = 0;
  std::uint64_t steps = 0;
};

// Both height chains: the under chain climbs w.p. 1-q^theta, adds an endpoint
// w.p. p q^theta and otherwise stays; the over chain climbs w.p. 1-q^phi and
// otherwise adds an endpoint.
inline ChainRates simulate_height_chains(double p, std::uint64_t steps, std::uint64_t seed) {
  require_probability(p);
  if (steps < 10000) throw ParameterError("steps must be >= 10^4");
  const double q = 1 - p;
  Rng master(seed);
  Rng ru = master.split("under"), ro = master.split("over");
  std::uint64_t eta = 0, mu = 0;
  long theta = 1, phi = 1;
  for (std::uint64_t s = 0; s < steps; ++s) {
    const double stay_u = std::pow(q, static_cast<double>(theta));
    const double u = ru.uniform01();
    if (u < 1 - stay_u) {
      ++eta;
      theta = 1;
    } else if (u < 1 - stay_u + p * stay_u) {
      ++theta;
    }
    const double stay_o = std::pow(q, static_cast<double>(phi));
    if (ro.uniform01() < 1 - stay_o) {
      ++mu;
      phi = 1;
    } else {
      ++phi;
    }
  }
  ChainRates r;
  r.steps = steps;
  r.under_rate = static_cast<double>(eta) / static_cast<double>(steps);
  r.over_rate = static_cast<double>(mu) / static_cast<double>(steps);
  return r;
}

struct GraphOrderRow {
  HeightEstimates est;
  MuBound mu;
  double sim_under = NAN, sim_over = NAN;
};

inline std::vector<double> probability_grid(std::size_t points) {
  require(points >= 1, "grid needs at least one point");
  std::vector<double> g;
  for (std::size_t i = 1; i <= points; ++i) g.push_back(static_cast<double>(i) / static_cast<double>(points + 1));
  return g;
}

}  // namespace qslab
