#pragma once

#include <stdexcept>
#include <string>

namespace coherence {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Entry (i,j) differs from conj(entry (j,i)) beyond tolerance, or the
/// array is not square.
struct NotHermitian : Error {
  using Error::Error;
};

/// Diagonal does not sum to one within tolerance.
struct TraceNotOne : Error {
  using Error::Error;
};

/// An eigenvalue lies below the strict-mode floor.
struct NotPositiveSemidefinite : Error {
  using Error::Error;
};

/// d < 2, or an operation needs a larger dimension (e.g. the cross-term
/// quantifier T, undefined at d = 2).
struct DimensionTooSmall : Error {
  using Error::Error;
};

struct InvalidFamilyParams : Error {
  using Error::Error;
};

/// Exponent outside the domain of the requested quantity.
struct InvalidP : Error {
  using Error::Error;
};

/// A square root argument that is provably nonnegative for unit-trace
/// tables came out negative beyond tolerance: the input breaks the
/// construction invariants.
struct NegativeRadicand : Error {
  using Error::Error;
};

struct InvalidTrials : Error {
  using Error::Error;
};

}  // namespace coherence
