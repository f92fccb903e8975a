#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "coherence/families.hpp"
#include "coherence/measures.hpp"

namespace coherence {

enum class IdentityKind { Equality, Inequality };

inline const char* to_string(IdentityKind k) {
  return k == IdentityKind::Equality ? "equality" : "inequality";
}

/// One checked identity or inequality on one state.
///
/// For equalities `value` is the residual and passing means
/// |value| <= tolerance. For inequalities `value` is the slack
/// (bound side minus constrained side) and passing means
/// value >= -tolerance.
struct IdentityResult {
  std::string identity_id;
  IdentityKind kind = IdentityKind::Equality;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string state_fingerprint;
  int d = 0;
  std::optional<double> p;
};

/// FNV-1a over dimension, mode and the raw entry bytes. Stable across runs,
/// so a failing result can be traced back to the exact sampled state.
inline std::string state_fingerprint(const HermitianState& rho) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t d = static_cast<std::uint64_t>(rho.dim());
  const std::uint8_t mode = rho.strict() ? 0 : 1;
  feed(&d, sizeof d);
  feed(&mode, sizeof mode);
  for (int i = 0; i < rho.dim(); ++i) {
    for (int j = 0; j < rho.dim(); ++j) {
      const double re = rho(i, j).real();
      const double im = rho(i, j).imag();
      feed(&re, sizeof re);
      feed(&im, sizeof im);
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline IdentityResult equality_result(std::string id, double residual,
                                      double tolerance,
                                      const HermitianState& rho,
                                      std::optional<double> p = std::nullopt) {
  IdentityResult r;
  r.identity_id = std::move(id);
  r.kind = IdentityKind::Equality;
  r.value = residual;
  r.tolerance = tolerance;
  r.passed = std::abs(residual) <= tolerance;
  r.state_fingerprint = state_fingerprint(rho);
  r.d = rho.dim();
  r.p = p;
  return r;
}

inline IdentityResult inequality_result(std::string id, double slack,
                                        double tolerance,
                                        const HermitianState& rho,
                                        std::optional<double> p = std::nullopt) {
  IdentityResult r;
  r.identity_id = std::move(id);
  r.kind = IdentityKind::Inequality;
  r.value = slack;
  r.tolerance = tolerance;
  r.passed = slack >= -tolerance;
  r.state_fingerprint = state_fingerprint(rho);
  r.d = rho.dim();
  r.p = p;
  return r;
}

}  // namespace detail

// --- exact equalities --------------------------------------------------------
//
// Residual conventions follow the identity written as LHS - RHS; every one of
// them is an exact algebraic identity on strict states, so residuals are
// rounding noise. Default tolerances: 1e-10 for the triality equalities,
// 1e-12 for the tighter purely-algebraic ones.

/// (d/(d-1)) C_l2^2 + M_l + P^2 - 1
inline IdentityResult residual_l2_triality(const HermitianState& rho,
                                           double tolerance = 1e-10) {
  const int d = rho.dim();
  const double cl2 = c_l2(rho);
  const double pp = particle_p(rho);
  const double residual = (static_cast<double>(d) / (d - 1)) * cl2 * cl2 +
                          mixedness_linear(rho) + pp * pp - 1.0;
  return detail::equality_result("l2_triality", residual, tolerance, rho);
}

/// (d/(d-1)) (C_l2^max)^2 + M_l - 1
inline IdentityResult residual_max_coherence_relation(const HermitianState& rho,
                                                      double tolerance = 1e-12) {
  const int d = rho.dim();
  const double cmax = c_l2_max(rho);
  const double residual = (static_cast<double>(d) / (d - 1)) * cmax * cmax +
                          mixedness_linear(rho) - 1.0;
  return detail::equality_result("max_coherence_relation", residual, tolerance,
                                 rho);
}

/// tr rho^2 - 1/d - ((d-1)/d) (P_D^2 + V_D^2)
inline IdentityResult residual_durr(const HermitianState& rho,
                                    double tolerance = 1e-10) {
  const int d = rho.dim();
  const WaveParticlePair q = durr_quantities(rho);
  const double residual =
      purity(rho) - 1.0 / d -
      (static_cast<double>(d - 1) / d) *
          (q.predictability * q.predictability + q.visibility * q.visibility);
  return detail::equality_result("durr_triality", residual, tolerance, rho);
}

/// P_JB^2 + V_JB^2 - 2 (tr rho^2 - 1/d)
inline IdentityResult residual_jb(const HermitianState& rho,
                                  double tolerance = 1e-10) {
  const WaveParticlePair q = jb_quantities(rho);
  const double residual = q.predictability * q.predictability +
                          q.visibility * q.visibility -
                          2.0 * (purity(rho) - 1.0 / rho.dim());
  return detail::equality_result("jb_triality", residual, tolerance, rho);
}

/// P_L + V_L + ((d-1)/d) M_l - 1
inline IdentityResult residual_fuluo(const HermitianState& rho,
                                     double tolerance = 1e-10) {
  const int d = rho.dim();
  const WaveParticlePair q = fuluo_quantities(rho);
  const double residual = q.predictability + q.visibility +
                          (static_cast<double>(d - 1) / d) *
                              mixedness_linear(rho) -
                          1.0;
  return detail::equality_result("fuluo_triality", residual, tolerance, rho);
}

/// (d^(p-1)/(d-1))^(2/p) C_lp^2 + M_l + P^2 + (d/(d-1)) X - 1,  1 <= p < 2
inline IdentityResult residual_lp_x_tradeoff(const HermitianState& rho, double p,
                                             double tolerance = 1e-10) {
  if (!(p >= 1.0 && p < 2.0)) {
    throw InvalidP("the X trade-off requires 1 <= p < 2, got " +
                   std::to_string(p));
  }
  const int d = rho.dim();
  const double clp = c_lp(rho, p);
  const double pp = particle_p(rho);
  const double coeff = std::pow(std::pow(d, p - 1.0) / (d - 1), 2.0 / p);
  const double residual =
      coeff * clp * clp + mixedness_linear(rho) + pp * pp +
      (static_cast<double>(d) / (d - 1)) * quantity_x(rho, p) - 1.0;
  return detail::equality_result("lp_x_tradeoff", residual, tolerance, rho, p);
}

/// (d^((3p-2)/p) (d-1)^((p-2)/p) / 2) C_lp^2 + M_l + P^2 - 1 - (d/(d-1)) Y
inline IdentityResult residual_lp_y_tradeoff(const HermitianState& rho, double p,
                                             double tolerance = 1e-10) {
  detail::require_p_in_unit_band(p);
  const int d = rho.dim();
  const double clp = c_lp(rho, p);
  const double pp = particle_p(rho);
  const double coeff = std::pow(static_cast<double>(d), (3.0 * p - 2.0) / p) *
                       std::pow(static_cast<double>(d - 1), (p - 2.0) / p) / 2.0;
  const double residual = coeff * clp * clp + mixedness_linear(rho) + pp * pp -
                          1.0 -
                          (static_cast<double>(d) / (d - 1)) * quantity_y(rho, p);
  return detail::equality_result("lp_y_tradeoff", residual, tolerance, rho, p);
}

/// (d/(2(d-1))) C_l1^2 + M_l + P^2 - 1 - ((d-2)(d+1)/2) T,  d >= 3
inline IdentityResult residual_machado(const HermitianState& rho,
                                       double tolerance = 1e-10) {
  const int d = rho.dim();
  const double cl1 = c_lp(rho, 1.0);
  const double pp = particle_p(rho);
  const double residual =
      (static_cast<double>(d) / (2.0 * (d - 1))) * cl1 * cl1 +
      mixedness_linear(rho) + pp * pp - 1.0 -
      (static_cast<double>(d - 2) * (d + 1) / 2.0) * machado_t(rho);
  return detail::equality_result("machado_relation", residual, tolerance, rho);
}

/// ((d-2)(d+1)/2) T - (d/(d-1)) Y(p=1); zero under the unordered-pair
/// convention for T, which is the cross-check pinning that convention.
inline IdentityResult machado_y_equivalence(const HermitianState& rho,
                                            double tolerance = 1e-12) {
  const int d = rho.dim();
  const double residual =
      (static_cast<double>(d - 2) * (d + 1) / 2.0) * machado_t(rho) -
      (static_cast<double>(d) / (d - 1)) * quantity_y(rho, 1.0);
  return detail::equality_result("machado_y_equivalence", residual, tolerance,
                                 rho);
}

/// X + Y - ((1/2)[d(d-1)]^((2p-2)/p) - [d(d-1)]^((p-2)/p)) C_lp^2.
/// Valid in any mode; at p = 1 the coefficient is (d-2)(d+1)/(2d(d-1)).
inline IdentityResult residual_xy_sum(const HermitianState& rho, double p,
                                      double tolerance = 1e-12) {
  detail::require_p_in_unit_band(p);
  const double dd = static_cast<double>(rho.dim()) * (rho.dim() - 1);
  const double clp = c_lp(rho, p);
  const double coeff = 0.5 * std::pow(dd, (2.0 * p - 2.0) / p) -
                       std::pow(dd, (p - 2.0) / p);
  const double residual =
      quantity_x(rho, p) + quantity_y(rho, p) - coeff * clp * clp;
  return detail::equality_result("xy_sum_relation", residual, tolerance, rho, p);
}

// --- inequalities ------------------------------------------------------------

/// Slack values (>= -tolerance when satisfied) for the proven bounds:
///   l2_mixedness_bound   1 - (d/(d-1)) C_l2^2 - M_l            (strict only)
///   lp_lower_bound       C_l2^2 - [d(d-1)]^((p-2)/p) C_lp^2
///   holder_bound         (1/2)[d(d-1)]^(2(p-1)/p) C_lp^2 - C_l2^2
///   y_upper_bound        ((d-2)(d+1)/(2d(d-1)))[d(d-1)]^(2(p-1)/p) C_lp^2 - Y
///   l1_l2_bound          C_l1^2 - 2 C_l2^2
inline std::vector<IdentityResult> slack_inequalities(const HermitianState& rho,
                                                      double p,
                                                      double tolerance = 1e-12) {
  detail::require_p_in_unit_band(p);
  const int d = rho.dim();
  const double dd = static_cast<double>(d) * (d - 1);
  const double clp = c_lp(rho, p);
  const double cl2 = c_l2(rho);
  const double cl1 = c_lp(rho, 1.0);

  std::vector<IdentityResult> out;
  if (rho.strict()) {
    const double slack = 1.0 - (static_cast<double>(d) / (d - 1)) * cl2 * cl2 -
                         mixedness_linear(rho);
    out.push_back(detail::inequality_result("l2_mixedness_bound", slack,
                                            tolerance, rho));
  }
  out.push_back(detail::inequality_result(
      "lp_lower_bound",
      cl2 * cl2 - std::pow(dd, (p - 2.0) / p) * clp * clp, tolerance, rho, p));
  out.push_back(detail::inequality_result(
      "holder_bound",
      0.5 * std::pow(dd, 2.0 * (p - 1.0) / p) * clp * clp - cl2 * cl2,
      tolerance, rho, p));
  const double y_bound = (static_cast<double>(d - 2) * (d + 1) / (2.0 * dd)) *
                         std::pow(dd, 2.0 * (p - 1.0) / p) * clp * clp;
  out.push_back(detail::inequality_result(
      "y_upper_bound", y_bound - quantity_y(rho, p), tolerance, rho, p));
  out.push_back(detail::inequality_result("l1_l2_bound",
                                          cl1 * cl1 - 2.0 * cl2 * cl2,
                                          tolerance, rho));
  return out;
}

// --- sampled axiom suites ------------------------------------------------------
//
// Measure conditions, checked on random ensembles:
//   a1  wave measure vanishes exactly on diagonal states, positive elsewhere
//   a2  global maximum at the uniform superposition (closed-form bound)
//   a3  invariance under basis permutations
//   a4  convexity under mixing
//   b1  particle measure is 1 at deterministic diagonals, <= 1 elsewhere
//   b2  particle measure vanishes at uniform diagonals, >= 0 elsewhere
//   b3  invariance under basis permutations
//   b4  convexity under mixing
//
// Margins are signed so that "comfortably satisfied" is positive; a trial
// counts as a violation when its margin drops below -tolerance (equality
// checks use 1e-12, sampled inequalities 1e-10). worst_margin is the
// minimum margin seen, so results merge deterministically by summing
// violations and taking the minimum margin.

struct AxiomSuiteResult {
  std::string axiom_id;
  int trials = 0;
  int violations = 0;
  double worst_margin = 0.0;
  int d = 0;
  std::optional<double> p;
};

namespace detail {

constexpr double kAxiomEqTol = 1e-12;
constexpr double kAxiomIneqTol = 1e-10;

struct AxiomAccumulator {
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();

  void note(double margin, double tolerance) {
    worst = std::min(worst, margin);
    if (margin < -tolerance) ++violations;
  }
};

inline std::vector<int> random_permutation(int d, Rng& rng) {
  std::vector<int> perm(d);
  for (int i = 0; i < d; ++i) perm[i] = i;
  for (int i = d - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

inline HermitianState permute_basis(const HermitianState& rho,
                                    const std::vector<int>& perm) {
  const int d = rho.dim();
  Matrix out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out(perm[i], perm[j]) = rho(i, j);
  }
  return HermitianState::validate(out, rho.mode());
}

inline HermitianState sample_strict(int d, Rng& rng, bool pure) {
  if (pure) {
    const Eigen::VectorXcd psi = haar_unit_vector(d, rng);
    return HermitianState::validate(psi * psi.adjoint(), Mode::Strict);
  }
  const Matrix g = ginibre_matrix(d, d, rng);
  Matrix m = g * g.adjoint();
  double trace = 0.0;
  for (int i = 0; i < d; ++i) trace += m(i, i).real();
  m /= trace;
  return HermitianState::validate(m, Mode::Strict);
}

inline HermitianState mix_states(const HermitianState& a,
                                 const HermitianState& b, double lambda) {
  // Mixtures of strict states are re-validated in strict mode.
  return HermitianState::validate(
      lambda * a.entries() + (1.0 - lambda) * b.entries(), Mode::Strict);
}

}  // namespace detail

/// Sampled wave-measure conditions a1..a4 for C_lp at fixed (d, p).
inline std::vector<AxiomSuiteResult> axiom_suite_wave(int d, double p,
                                                      int trials,
                                                      std::uint64_t seed) {
  if (trials < 1) throw InvalidTrials("trials must be >= 1");
  detail::require_p_in_unit_band(p);
  if (d < 2) throw DimensionTooSmall("dimension must be at least 2");

  detail::AxiomAccumulator a1, a2, a3, a4;
  const double global_max =
      std::pow((d - 1.0) / std::pow(static_cast<double>(d), p - 1.0), 1.0 / p);

  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    const HermitianState rho = detail::sample_strict(d, rng, t % 2 == 1);
    const double c = c_lp(rho, p);

    // a1: exactly zero after dephasing, positive on the coherent sample.
    a1.note(-c_lp(dephase(rho), p), detail::kAxiomEqTol);
    a1.note(c, detail::kAxiomEqTol);
    if (c <= detail::kAxiomEqTol) ++a1.violations;

    a2.note(global_max - c, detail::kAxiomIneqTol);

    const HermitianState permuted =
        detail::permute_basis(rho, detail::random_permutation(d, rng));
    a3.note(-std::abs(c_lp(permuted, p) - c), detail::kAxiomEqTol);

    const HermitianState other = detail::sample_strict(d, rng, t % 2 == 0);
    const double lambda = rng.uniform();
    const HermitianState mix = detail::mix_states(rho, other, lambda);
    a4.note(lambda * c + (1.0 - lambda) * c_lp(other, p) - c_lp(mix, p),
            detail::kAxiomIneqTol);
  }

  const auto pack = [&](const char* id, const detail::AxiomAccumulator& acc) {
    return AxiomSuiteResult{id, trials, acc.violations, acc.worst, d, p};
  };
  return {pack("a1", a1), pack("a2", a2), pack("a3", a3), pack("a4", a4)};
}

/// Sampled particle-measure conditions b1..b4 for P at fixed d.
inline std::vector<AxiomSuiteResult> axiom_suite_particle(int d, int trials,
                                                          std::uint64_t seed) {
  if (trials < 1) throw InvalidTrials("trials must be >= 1");
  if (d < 2) throw DimensionTooSmall("dimension must be at least 2");

  detail::AxiomAccumulator b1, b2, b3, b4;

  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    const HermitianState rho = detail::sample_strict(d, rng, t % 2 == 1);
    const double value = particle_p(rho);

    // b1: unit value on a deterministic diagonal, never exceeded elsewhere.
    std::vector<double> point(static_cast<std::size_t>(d), 0.0);
    point[rng.below(static_cast<std::uint64_t>(d))] = 1.0;
    const HermitianState deterministic =
        make_family(StateFamilySpec::incoherent_diagonal(point), d);
    b1.note(-std::abs(particle_p(deterministic) - 1.0), detail::kAxiomEqTol);
    b1.note(1.0 - value, detail::kAxiomIneqTol);

    // b2: zero on a uniform diagonal (coherent or not), nonnegative always.
    // The zero check is made on P^2: the radicand is the compensated sum,
    // while sqrt turns 1e-17 of rounding into 1e-9 of measure.
    const double a = 0.1 + 0.8 * rng.uniform();
    const double at_uniform = particle_p(make_family(StateFamilySpec::mcms(a), d));
    b2.note(-at_uniform * at_uniform, detail::kAxiomEqTol);
    b2.note(value, detail::kAxiomEqTol);

    const HermitianState permuted =
        detail::permute_basis(rho, detail::random_permutation(d, rng));
    b3.note(-std::abs(particle_p(permuted) - value), detail::kAxiomEqTol);

    const HermitianState other = detail::sample_strict(d, rng, t % 2 == 0);
    const double lambda = rng.uniform();
    const HermitianState mix = detail::mix_states(rho, other, lambda);
    b4.note(lambda * value + (1.0 - lambda) * particle_p(other) -
                particle_p(mix),
            detail::kAxiomIneqTol);
  }

  const auto pack = [&](const char* id, const detail::AxiomAccumulator& acc) {
    return AxiomSuiteResult{id, trials, acc.violations, acc.worst, d,
                            std::nullopt};
  };
  return {pack("b1", b1), pack("b2", b2), pack("b3", b3), pack("b4", b4)};
}

// --- serialization -----------------------------------------------------------

inline nlohmann::json to_json(const IdentityResult& r) {
  nlohmann::json j{{"identity_id", r.identity_id},
                   {"kind", to_string(r.kind)},
                   {"value", r.value},
                   {"tolerance", r.tolerance},
                   {"passed", r.passed},
                   {"state_fingerprint", r.state_fingerprint},
                   {"d", r.d}};
  if (r.p.has_value()) j["p"] = *r.p;
  return j;
}

inline nlohmann::json to_json(const AxiomSuiteResult& r) {
  nlohmann::json j{{"axiom_id", r.axiom_id},
                   {"trials", r.trials},
                   {"violations", r.violations},
                   {"worst_margin", r.worst_margin},
                   {"d", r.d}};
  if (r.p.has_value()) j["p"] = *r.p;
  return j;
}

}  // namespace coherence
