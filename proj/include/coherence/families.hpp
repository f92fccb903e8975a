#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coherence/errors.hpp"
#include "coherence/random.hpp"
#include "coherence/state.hpp"

namespace coherence {

enum class FamilyKind {
  MaxCoherentPure,     // uniform superposition projector, every entry 1/d
  CompletelyMixed,     // I/d
  Mcms,                // a * (uniform projector) + (1-a)/d * I
  SinglePair,          // diagonal 1/d with one symmetric off-diagonal pair
  UniformOffDiag,      // diagonal 1/d with the first n pairs set to m
  IncoherentDiagonal,  // given probability vector on the diagonal
  RandomPureHaar,      // projector onto a Haar-random unit vector
  RandomMixedHS,       // G G^dag / tr, G complex gaussian d x rank
};

/// Symbolic description of a named state family. Construction through the
/// factory helpers keeps kind-specific parameters consistent.
struct StateFamilySpec {
  FamilyKind kind = FamilyKind::CompletelyMixed;

  double weight = 0.0;                // Mcms: a in (0,1)
  int pair_row = 0;                   // SinglePair: i0 (0-based)
  int pair_col = 1;                   // SinglePair: j0
  double magnitude = 0.0;             // SinglePair / UniformOffDiag: m >= 0
  int pair_count = 0;                 // UniformOffDiag: n
  std::vector<double> probabilities;  // IncoherentDiagonal
  int rank = 0;                       // RandomMixedHS
  std::uint64_t seed = 0;             // random kinds

  static StateFamilySpec max_coherent_pure() {
    return {FamilyKind::MaxCoherentPure};
  }
  static StateFamilySpec completely_mixed() {
    return {FamilyKind::CompletelyMixed};
  }
  static StateFamilySpec mcms(double a) {
    StateFamilySpec s{FamilyKind::Mcms};
    s.weight = a;
    return s;
  }
  static StateFamilySpec single_pair(int i0, int j0, double m) {
    StateFamilySpec s{FamilyKind::SinglePair};
    s.pair_row = i0;
    s.pair_col = j0;
    s.magnitude = m;
    return s;
  }
  static StateFamilySpec uniform_off_diag(int n, double m) {
    StateFamilySpec s{FamilyKind::UniformOffDiag};
    s.pair_count = n;
    s.magnitude = m;
    return s;
  }
  static StateFamilySpec incoherent_diagonal(std::vector<double> probs) {
    StateFamilySpec s{FamilyKind::IncoherentDiagonal};
    s.probabilities = std::move(probs);
    return s;
  }
  static StateFamilySpec random_pure_haar(std::uint64_t seed) {
    StateFamilySpec s{FamilyKind::RandomPureHaar};
    s.seed = seed;
    return s;
  }
  static StateFamilySpec random_mixed_hs(int rank, std::uint64_t seed) {
    StateFamilySpec s{FamilyKind::RandomMixedHS};
    s.rank = rank;
    s.seed = seed;
    return s;
  }
};

/// Matrix of independent standard complex gaussians, row-major fill order
/// so that the draw sequence is part of the deterministic contract.
inline Matrix ginibre_matrix(int rows, int cols, Rng& rng) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_gaussian();
  }
  return g;
}

/// Haar-distributed unit vector: QR of a square Ginibre matrix with the
/// R-diagonal phases folded back into Q, first column taken.
inline Eigen::VectorXcd haar_unit_vector(int d, Rng& rng) {
  const Matrix g = ginibre_matrix(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const std::complex<double> rjj = r(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= (mag > 0.0) ? rjj / mag : std::complex<double>{1.0, 0.0};
  }
  Eigen::VectorXcd psi = q.col(0);
  psi /= psi.norm();
  return psi;
}

namespace detail {

// Row-major enumeration of the unordered pairs (i < j):
// (0,1), (0,2), ..., (0,d-1), (1,2), ...
inline std::vector<std::pair<int, int>> upper_pairs(int d) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

// Strict when PSD holds within tolerance, formal fallback otherwise.
inline HermitianState strict_or_formal(const Matrix& m, const Tolerances& tol) {
  const Eigen::VectorXd eigs = hermitian_eigenvalues(m);
  const Mode mode = eigs(0) >= -tol.psd ? Mode::Strict : Mode::Formal;
  return HermitianState::validate(m, mode, tol);
}

}  // namespace detail

/// Builds the described family member at dimension d. Deterministic given
/// (spec, spec.seed). Families whose parameters can leave the PSD cone
/// (SinglePair, UniformOffDiag) degrade to formal mode instead of failing.
inline HermitianState make_family(const StateFamilySpec& spec, int d,
                                  const Tolerances& tol = Tolerances{}) {
  if (d < 2) {
    throw DimensionTooSmall("dimension must be at least 2, got " + std::to_string(d));
  }
  const double inv_d = 1.0 / d;

  switch (spec.kind) {
    case FamilyKind::MaxCoherentPure: {
      Matrix m = Matrix::Constant(d, d, std::complex<double>{inv_d, 0.0});
      return HermitianState::validate(m, Mode::Strict, tol);
    }

    case FamilyKind::CompletelyMixed: {
      Matrix m = inv_d * Matrix::Identity(d, d);
      return HermitianState::validate(m, Mode::Strict, tol);
    }

    case FamilyKind::Mcms: {
      if (!(spec.weight > 0.0 && spec.weight < 1.0)) {
        throw InvalidFamilyParams("MCMS weight a must lie in (0,1), got " +
                                  std::to_string(spec.weight));
      }
      // Diagonal a/d + (1-a)/d collapses to exactly 1/d.
      Matrix m = Matrix::Constant(d, d, std::complex<double>{spec.weight * inv_d, 0.0});
      for (int i = 0; i < d; ++i) m(i, i) = inv_d;
      return HermitianState::validate(m, Mode::Strict, tol);
    }

    case FamilyKind::SinglePair: {
      if (spec.pair_row == spec.pair_col) {
        throw InvalidFamilyParams("single-pair indices must differ");
      }
      if (spec.pair_row < 0 || spec.pair_col < 0 || spec.pair_row >= d ||
          spec.pair_col >= d) {
        throw InvalidFamilyParams("single-pair indices out of range for d = " +
                                  std::to_string(d));
      }
      if (!(spec.magnitude >= 0.0)) {
        throw InvalidFamilyParams("single-pair magnitude must be >= 0");
      }
      Matrix m = inv_d * Matrix::Identity(d, d);
      m(spec.pair_row, spec.pair_col) = spec.magnitude;
      m(spec.pair_col, spec.pair_row) = spec.magnitude;
      return detail::strict_or_formal(m, tol);
    }

    case FamilyKind::UniformOffDiag: {
      const int max_pairs = d * (d - 1) / 2;
      if (spec.pair_count < 1 || spec.pair_count > max_pairs) {
        throw InvalidFamilyParams("pair count must lie in [1, " +
                                  std::to_string(max_pairs) + "], got " +
                                  std::to_string(spec.pair_count));
      }
      if (!(spec.magnitude >= 0.0)) {
        throw InvalidFamilyParams("off-diagonal magnitude must be >= 0");
      }
      Matrix m = inv_d * Matrix::Identity(d, d);
      const auto pairs = detail::upper_pairs(d);
      for (int k = 0; k < spec.pair_count; ++k) {
        m(pairs[k].first, pairs[k].second) = spec.magnitude;
        m(pairs[k].second, pairs[k].first) = spec.magnitude;
      }
      return detail::strict_or_formal(m, tol);
    }

    case FamilyKind::IncoherentDiagonal: {
      if (static_cast<int>(spec.probabilities.size()) != d) {
        throw InvalidFamilyParams("probability vector length must equal d");
      }
      double sum = 0.0;
      for (const double p : spec.probabilities) {
        if (!(p >= 0.0)) {
          throw InvalidFamilyParams("probabilities must be nonnegative");
        }
        sum += p;
      }
      if (!(std::abs(sum - 1.0) <= 1e-12)) {
        throw InvalidFamilyParams("probabilities must sum to one, got " +
                                  std::to_string(sum));
      }
      Matrix m = Matrix::Zero(d, d);
      for (int i = 0; i < d; ++i) m(i, i) = spec.probabilities[i];
      return HermitianState::validate(m, Mode::Strict, tol);
    }

    case FamilyKind::RandomPureHaar: {
      Rng rng(spec.seed);
      const Eigen::VectorXcd psi = haar_unit_vector(d, rng);
      Matrix m = psi * psi.adjoint();
      return HermitianState::validate(m, Mode::Strict, tol);
    }

    case FamilyKind::RandomMixedHS: {
      if (spec.rank < 1) {
        throw InvalidFamilyParams("rank must be >= 1, got " +
                                  std::to_string(spec.rank));
      }
      Rng rng(spec.seed);
      const Matrix g = ginibre_matrix(d, spec.rank, rng);
      Matrix m = g * g.adjoint();
      double trace = 0.0;
      for (int i = 0; i < d; ++i) trace += m(i, i).real();
      m /= trace;
      return HermitianState::validate(m, Mode::Strict, tol);
    }
  }
  throw InvalidFamilyParams("unknown family kind");
}

}  // namespace coherence
