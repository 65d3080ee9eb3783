#pragma once

#include <string>
#include <vector>

#include "noncoh/channel.hpp"
#include "noncoh/common.hpp"
#include "noncoh/subspace.hpp"

namespace noncoh {

/**
 * Receiver side information E(t) = (A(:, 0:Q))^-1 A(:, t) for the trailing
 * block positions. Column j of E corresponds to position Q + j (0-based), so
 * in the canonical form of the received span B(q, t) = E(q, t) x(t) / x(q).
 */
struct SideInformation {
  Matrix E;  // Q x (T - Q)

  // E(t) for a 0-based block position t in [Q, T)
  Vector column(int t) const { return E.col(t - static_cast<int>(E.rows())); }
};

// Requires the leading Q x Q block of A to be well conditioned; throws
// SingularPivotError otherwise.
SideInformation compute_side_information(const CorrelationProfile& profile);

// One violated decodability condition. Positions are 1-based as printed in
// reports (q in 1..Q, t in Q+1..T); magnitude is the offending near-zero
// value, measured both ways when two routes are checked.
struct ConditionFailure {
  std::string condition;
  int q = 0;
  int t = 0;
  std::vector<int> indices;  // offending 1-based column set, {q, t} for the E checks
  double magnitude = 0.0;    // |E^q(t)|, or the smallest singular value of a column subset
  double det_ratio = 0.0;    // |det with column q replaced by A(:,t)| / |det A(:,1:Q)|
};

struct RecoveryReport {
  bool passed = false;
  std::vector<ConditionFailure> failures;
  std::vector<std::string> notes;  // encoder-side requirements not checkable from A
};

// Verifies E^q(T) != 0 for all q and E^1(t) != 0 for Q < t < T. Every entry
// is tested twice: through E itself and through the equivalent
// column-replacement determinant; the two routes must agree.
RecoveryReport check_recovery_simo(const CorrelationProfile& profile);

struct DecodeDiagnostics {
  std::vector<std::string> guard_trips;
  double subspace_cond = 0.0;  // sigma_1/sigma_L of the low-rank estimate input
  double pivot_cond = 0.0;     // condition of the canonical pivot block
  double solve_cond = 0.0;     // condition of the nonlinear-phase system
  double residual = 0.0;       // consistency residual of over-determined solves
};

struct SimoDecodeResult {
  Vector x;   // length T, x(T-1) == 1; valid only when ok
  bool ok = false;
  DecodeDiagnostics diag;
};

struct SimoOptions {
  // Recover x(t) for Q < t < T-1 by chaining through q = 1 (the algorithm's
  // own choice). The least-squares alternative averages over every usable q;
  // it is off by default because it deviates from the exact chaining rule.
  bool ls_chaining = false;
  double guard_tol = kGuardTol;
  // relative residual above which an over-determined pilot system is
  // reported as inconsistent with the signal model
  double consistency_tol = 0.1;
};

// Nonlinear subspace decoder for Q <= min(T-1, n_r) with training x(T) = 1.
// Numerical failures (rank-deficient estimates, magnitudes under the guard
// threshold) are flagged in the result, never silently ignored.
SimoDecodeResult decode_simo(const Matrix& y_noisy, const CorrelationProfile& profile,
                             const SimoOptions& options = {});

// Reduced-antenna variant for n_r < Q: pilots x(T-P+1) = ... = x(T) = 1 with
// P = ceil(Q / n_r) by default, solved as a stacked least-squares system.
// Payload is the leading T - P positions. Also valid at n_r == Q, where it
// matches decode_simo on noiseless data.
SimoDecodeResult decode_simo_reduced(const Matrix& y_noisy, const CorrelationProfile& profile,
                                     int n_pilots = 0, const SimoOptions& options = {});

}  // namespace noncoh
