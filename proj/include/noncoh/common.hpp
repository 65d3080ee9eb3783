#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace noncoh {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Numeric guards shared across modules.
inline constexpr double kRankTol = 1e-8;    // min/max singular value ratio for full rank
inline constexpr double kCondLimit = 1e10;  // pivot blocks above this are singular
inline constexpr double kGuardTol = 1e-10;  // relative magnitude floor for divisions

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A matrix required to have full row rank does not.
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

// The selected pivot block is numerically singular. Callers of canonical_form
// may retry with the greedy-conditioned pivot policy.
class SingularPivotError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

inline void require_dims(bool cond, const std::string& what) {
  if (!cond) throw DimensionError(what);
}

}  // namespace noncoh
