#pragma once

#include <Eigen/Dense>
#include <complex>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "json.hpp"

#include "coherence/accumulate.hpp"
#include "coherence/errors.hpp"

namespace coherence {

using Matrix = Eigen::MatrixXcd;

/// Validity regime of a Hermitian unit-trace table.
///
/// Strict tables are density matrices (positive semidefinite within
/// tolerance). Formal tables keep hermiticity and unit trace but drop the
/// positivity requirement; the entrywise quantifiers are well-defined
/// functions of the entries either way, and some off-diagonal sweep
/// patterns are not physical states.
enum class Mode { Strict, Formal };

inline const char* to_string(Mode m) {
  return m == Mode::Strict ? "strict" : "formal";
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "strict") return Mode::Strict;
  if (s == "formal") return Mode::Formal;
  throw Error("unknown validity mode \"" + s + "\" (expected strict or formal)");
}

/// Validation tolerances. The eigenvalue floor is looser than the
/// hermiticity/trace tolerances: d <= 16 spectra accumulate more rounding
/// in the eigensolver than entrywise checks do.
struct Tolerances {
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double psd = 1e-10;
};

/// Ascending eigenvalues of a (near-)Hermitian matrix; only the lower
/// triangle is referenced, so within-tolerance asymmetry is harmless.
inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// A validated d x d complex Hermitian unit-trace table in the fixed
/// computational basis. Immutable after construction; all operations on it
/// are pure functions, so concurrent use needs no synchronization.
class HermitianState {
 public:
  /// Checks every invariant of `mode` and returns the state on success.
  /// The entries are stored exactly as given: asymmetry within tolerance is
  /// preserved, asymmetry beyond it is an error, never symmetrized away.
  static HermitianState validate(const Matrix& entries, Mode mode,
                                 const Tolerances& tol = Tolerances{}) {
    if (entries.rows() != entries.cols()) {
      throw NotHermitian("hermiticity violated: matrix is not square (" +
                         std::to_string(entries.rows()) + " x " +
                         std::to_string(entries.cols()) + ")");
    }
    const int d = static_cast<int>(entries.rows());
    if (d < 2) {
      throw DimensionTooSmall("dimension must be at least 2, got " +
                              std::to_string(d));
    }

    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        const double asym = std::abs(entries(i, j) - std::conj(entries(j, i)));
        if (!(asym <= tol.hermiticity)) {
          throw NotHermitian("hermiticity violated at (" + std::to_string(i) +
                             "," + std::to_string(j) + "): |rho_ij - conj(rho_ji)| = " +
                             std::to_string(asym));
        }
      }
    }

    std::complex<double> trace{0.0, 0.0};
    for (int i = 0; i < d; ++i) trace += entries(i, i);
    const double trace_error = std::abs(trace - std::complex<double>{1.0, 0.0});
    if (!(trace_error <= tol.trace)) {
      throw TraceNotOne("trace not one: |tr - 1| = " + std::to_string(trace_error));
    }

    if (mode == Mode::Strict) {
      const Eigen::VectorXd eigs = hermitian_eigenvalues(entries);
      if (!(eigs(0) >= -tol.psd)) {
        throw NotPositiveSemidefinite(
            "not positive semidefinite: smallest eigenvalue " +
            std::to_string(eigs(0)));
      }
    }
    return HermitianState(entries, mode);
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  Mode mode() const { return mode_; }
  bool strict() const { return mode_ == Mode::Strict; }
  const Matrix& entries() const { return entries_; }
  std::complex<double> operator()(int i, int j) const { return entries_(i, j); }

  /// Diagonal part, off-diagonals exactly zero. Idempotent by construction.
  /// The result is strict when the surviving diagonal is a probability
  /// vector within tolerance, formal otherwise (possible for formal input).
  HermitianState dephased(const Tolerances& tol = Tolerances{}) const {
    const int d = dim();
    Matrix out = Matrix::Zero(d, d);
    bool nonnegative = true;
    for (int i = 0; i < d; ++i) {
      out(i, i) = entries_(i, i);
      if (!(entries_(i, i).real() >= -tol.psd)) nonnegative = false;
    }
    return HermitianState(std::move(out),
                          nonnegative ? Mode::Strict : Mode::Formal);
  }

 private:
  HermitianState(Matrix entries, Mode mode)
      : entries_(std::move(entries)), mode_(mode) {}

  Matrix entries_;
  Mode mode_;
};

/// Entrywise square sum, equal to tr(rho^2) for Hermitian tables.
/// In [1/d, 1] for strict states.
inline double purity(const HermitianState& rho) {
  const Matrix& m = rho.entries();
  CompensatedSum s;
  for (int i = 0; i < rho.dim(); ++i) {
    for (int j = 0; j < rho.dim(); ++j) s.add(std::norm(m(i, j)));
  }
  return s.value();
}

inline HermitianState dephase(const HermitianState& rho) {
  return rho.dephased();
}

// --- state file format -----------------------------------------------------
//
// {"dim": d, "mode": "strict"|"formal", "re": [[...]], "im": [[...]]}
// row-major, full matrix (both triangles).

inline nlohmann::json state_to_json(const HermitianState& rho) {
  const int d = rho.dim();
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (int i = 0; i < d; ++i) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (int j = 0; j < d; ++j) {
      re_row.push_back(rho(i, j).real());
      im_row.push_back(rho(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return nlohmann::json{{"dim", d},
                        {"mode", to_string(rho.mode())},
                        {"re", std::move(re)},
                        {"im", std::move(im)}};
}

inline HermitianState state_from_json(const nlohmann::json& j,
                                      const Tolerances& tol = Tolerances{}) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("mode") ||
      !j.contains("re") || !j.contains("im")) {
    throw Error("state file must be an object with dim, mode, re, im");
  }
  const int d = j.at("dim").get<int>();
  if (d < 2) throw DimensionTooSmall("dimension must be at least 2, got " + std::to_string(d));
  const Mode mode = mode_from_string(j.at("mode").get<std::string>());
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != d ||
      static_cast<int>(im.size()) != d) {
    throw Error("re/im must be " + std::to_string(d) + " x " + std::to_string(d) + " arrays");
  }
  Matrix m(d, d);
  for (int i = 0; i < d; ++i) {
    const auto& re_row = re.at(i);
    const auto& im_row = im.at(i);
    if (static_cast<int>(re_row.size()) != d || static_cast<int>(im_row.size()) != d) {
      throw Error("re/im must be " + std::to_string(d) + " x " + std::to_string(d) + " arrays");
    }
    for (int jj = 0; jj < d; ++jj) {
      m(i, jj) = std::complex<double>(re_row.at(jj).get<double>(),
                                      im_row.at(jj).get<double>());
    }
  }
  return HermitianState::validate(m, mode, tol);
}

inline void write_state(std::ostream& os, const HermitianState& rho) {
  os << state_to_json(rho).dump(2) << '\n';
}

inline HermitianState read_state(std::istream& is,
                                 const Tolerances& tol = Tolerances{}) {
  return state_from_json(nlohmann::json::parse(is), tol);
}

}  // namespace coherence
