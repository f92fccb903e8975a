#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "json.hpp"

#include "coherence/accumulate.hpp"
#include "coherence/errors.hpp"
#include "coherence/state.hpp"

namespace coherence {

namespace detail {

inline void require_p_at_least_one(double p) {
  if (!(p >= 1.0)) {
    throw InvalidP("p must be >= 1, got " + std::to_string(p));
  }
}

inline void require_p_in_unit_band(double p) {
  if (!(p >= 1.0 && p <= 2.0)) {
    throw InvalidP("p must lie in [1, 2], got " + std::to_string(p));
  }
}

// sum_{i != j} |rho_ij|^p
inline double off_diag_power_sum(const Matrix& m, double p) {
  const int d = static_cast<int>(m.rows());
  CompensatedSum s;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i != j) s.add(std::pow(std::abs(m(i, j)), p));
    }
  }
  return s.value();
}

// sum_{i != j} |rho_ij|^2
inline double off_diag_square_sum(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  CompensatedSum s;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i != j) s.add(std::norm(m(i, j)));
    }
  }
  return s.value();
}

// sum_i |rho_ii|^2; modulus so formal tables are handled uniformly.
inline double diag_square_sum(const Matrix& m) {
  CompensatedSum s;
  for (int i = 0; i < m.rows(); ++i) s.add(std::norm(m(i, i)));
  return s.value();
}

// sum_i (|rho_ii| - 1/d)^2
inline double diag_deviation_square_sum(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  const double inv_d = 1.0 / d;
  CompensatedSum s;
  for (int i = 0; i < d; ++i) {
    const double dev = std::abs(m(i, i)) - inv_d;
    s.add(dev * dev);
  }
  return s.value();
}

// Pair sums over the unordered off-diagonal magnitudes (i < j).
inline double upper_pair_sum(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  CompensatedSum s;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) s.add(std::abs(m(i, j)));
  }
  return s.value();
}

inline double upper_pair_square_sum(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  CompensatedSum s;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) s.add(std::norm(m(i, j)));
  }
  return s.value();
}

}  // namespace detail

/// l_p-norm coherence: (sum_{i != j} |rho_ij|^p)^(1/p). Zero for diagonal
/// tables. p in [1,2] is the regime of the trade-off identities; larger p
/// is permitted for exploration.
inline double c_lp(const HermitianState& rho, double p) {
  detail::require_p_at_least_one(p);
  return std::pow(detail::off_diag_power_sum(rho.entries(), p), 1.0 / p);
}

/// l_2-norm coherence, the p = 2 specialization.
inline double c_l2(const HermitianState& rho) {
  return std::sqrt(detail::off_diag_square_sum(rho.entries()));
}

/// Basis-maximized l_2 coherence, closed form sqrt(tr rho^2 - 1/d).
/// The radicand cannot drop below zero for unit-trace tables of either
/// mode; a violation beyond tolerance means the input broke construction
/// invariants upstream.
inline double c_l2_max(const HermitianState& rho) {
  const double radicand = purity(rho) - 1.0 / rho.dim();
  if (radicand < -1e-12) {
    throw NegativeRadicand("purity below 1/d by " + std::to_string(-radicand));
  }
  return std::sqrt(std::max(radicand, 0.0));
}

/// Normalized linear-entropy mixedness: (d/(d-1)) (1 - tr rho^2).
/// In [0,1] for strict states, unconstrained for formal tables.
inline double mixedness_linear(const HermitianState& rho) {
  const int d = rho.dim();
  return (static_cast<double>(d) / (d - 1)) * (1.0 - purity(rho));
}

/// Particle (predictability-type) measure
/// sqrt((d/(d-1)) (sum_i |rho_ii|^2 - 1/d)); depends only on the diagonal.
inline double particle_p(const HermitianState& rho) {
  const int d = rho.dim();
  const double excess = detail::diag_square_sum(rho.entries()) - 1.0 / d;
  if (excess < -1e-12) {
    throw NegativeRadicand("diagonal square sum below 1/d by " +
                           std::to_string(-excess));
  }
  return std::sqrt((static_cast<double>(d) / (d - 1)) * std::max(excess, 0.0));
}

struct WaveParticlePair {
  double visibility = 0.0;
  double predictability = 0.0;
};

/// Interferometric visibility/predictability pair
/// V = sqrt((d/(d-1)) sum_{i != j} |rho_ij|^2),
/// P = sqrt((d/(d-1)) sum_i (|rho_ii| - 1/d)^2).
inline WaveParticlePair durr_quantities(const HermitianState& rho) {
  const int d = rho.dim();
  const double scale = static_cast<double>(d) / (d - 1);
  return {std::sqrt(scale * detail::off_diag_square_sum(rho.entries())),
          std::sqrt(scale * detail::diag_deviation_square_sum(rho.entries()))};
}

/// V = sqrt(2 sum_{i != j} |rho_ij|^2), P = sqrt(2 (sum_i |rho_ii|^2 - 1/d)).
inline WaveParticlePair jb_quantities(const HermitianState& rho) {
  const int d = rho.dim();
  const double diag_excess =
      std::max(detail::diag_square_sum(rho.entries()) - 1.0 / d, 0.0);
  return {std::sqrt(2.0 * detail::off_diag_square_sum(rho.entries())),
          std::sqrt(2.0 * diag_excess)};
}

/// V = sum_{i != j} |rho_ij|^2, P = sum_i |rho_ii|^2 (quadratic, unscaled).
inline WaveParticlePair fuluo_quantities(const HermitianState& rho) {
  return {detail::off_diag_square_sum(rho.entries()),
          detail::diag_square_sum(rho.entries())};
}

/// Coherence-concentration gap
///   X = C_l2^2 - [d(d-1)]^((p-2)/p) C_lp^2.
/// Nonnegative for p < 2 by the power-mean bound on the off-diagonal
/// magnitudes (any mode); identically zero at p = 2 and whenever all
/// off-diagonal magnitudes coincide.
inline double quantity_x(const HermitianState& rho, double p) {
  detail::require_p_in_unit_band(p);
  const double dd = static_cast<double>(rho.dim()) * (rho.dim() - 1);
  const double clp = c_lp(rho, p);
  const double cl2 = c_l2(rho);
  return cl2 * cl2 - std::pow(dd, (p - 2.0) / p) * clp * clp;
}

/// Coherence-spread gap
///   Y = (1/2) [d(d-1)]^(2(p-1)/p) C_lp^2 - C_l2^2.
/// Nonnegative for p >= 1 (Hoelder); zero at p = 1 exactly when at most one
/// unordered off-diagonal pair is populated.
inline double quantity_y(const HermitianState& rho, double p) {
  detail::require_p_in_unit_band(p);
  const double dd = static_cast<double>(rho.dim()) * (rho.dim() - 1);
  const double clp = c_lp(rho, p);
  const double cl2 = c_l2(rho);
  return 0.5 * std::pow(dd, 2.0 * (p - 1.0) / p) * clp * clp - cl2 * cl2;
}

/// Cross-term quantifier
///   T = 4d / ((d-2)(d^2-1)) * sum_{i<j} sum_{(k<l) != (i,j)} |rho_ij||rho_kl|,
/// with the inner sum over unordered pairs distinct from (i,j). Under this
/// convention ((d-2)(d+1)/2) T = (d/(d-1)) Y at p = 1 exactly; the
/// ordered-pair convention would double T and break that equivalence (see
/// README and the convention tests). Undefined at d = 2.
inline double machado_t(const HermitianState& rho) {
  const int d = rho.dim();
  if (d < 3) {
    throw DimensionTooSmall("cross-term quantifier T requires d >= 3");
  }
  const double s1 = detail::upper_pair_sum(rho.entries());
  const double s2 = detail::upper_pair_square_sum(rho.entries());
  const double coeff =
      4.0 * d / (static_cast<double>(d - 2) * (static_cast<double>(d) * d - 1));
  // (sum u)^2 - sum u^2 = sum over ordered distinct unordered-pair indices.
  return coeff * (s1 * s1 - s2);
}

/// Every quantifier of one state at one exponent. T is absent when d = 2.
struct MeasureReport {
  int d = 0;
  double p = 1.0;
  double c_lp = 0.0;
  double c_l2 = 0.0;
  double c_l2_max = 0.0;
  double m_l = 0.0;
  double particle_p = 0.0;
  double v_d = 0.0;
  double p_d = 0.0;
  double v_jb = 0.0;
  double p_jb = 0.0;
  double v_l = 0.0;
  double p_l = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> t;
};

inline MeasureReport full_report(const HermitianState& rho, double p) {
  detail::require_p_in_unit_band(p);
  MeasureReport r;
  r.d = rho.dim();
  r.p = p;
  r.c_lp = c_lp(rho, p);
  r.c_l2 = c_l2(rho);
  r.c_l2_max = c_l2_max(rho);
  r.m_l = mixedness_linear(rho);
  r.particle_p = particle_p(rho);
  const WaveParticlePair durr = durr_quantities(rho);
  r.v_d = durr.visibility;
  r.p_d = durr.predictability;
  const WaveParticlePair jb = jb_quantities(rho);
  r.v_jb = jb.visibility;
  r.p_jb = jb.predictability;
  const WaveParticlePair fl = fuluo_quantities(rho);
  r.v_l = fl.visibility;
  r.p_l = fl.predictability;
  r.x = quantity_x(rho, p);
  r.y = quantity_y(rho, p);
  if (rho.dim() >= 3) r.t = machado_t(rho);
  return r;
}

/// Flat JSON object with snake_case keys; an absent T is key omission.
inline nlohmann::json to_json(const MeasureReport& r) {
  nlohmann::json j{
      {"d", r.d},           {"p", r.p},
      {"c_lp", r.c_lp},     {"c_l2", r.c_l2},
      {"c_l2_max", r.c_l2_max}, {"m_l", r.m_l},
      {"particle_p", r.particle_p},
      {"v_d", r.v_d},       {"p_d", r.p_d},
      {"v_jb", r.v_jb},     {"p_jb", r.p_jb},
      {"v_l", r.v_l},       {"p_l", r.p_l},
      {"x", r.x},           {"y", r.y},
  };
  if (r.t.has_value()) j["t"] = *r.t;
  return j;
}

}  // namespace coherence
