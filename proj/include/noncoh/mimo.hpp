#pragma once

#include "noncoh/channel.hpp"
#include "noncoh/common.hpp"
#include "noncoh/simo.hpp"
#include "noncoh/subspace.hpp"

namespace noncoh {

/**
 * Training structure of the two-phase decoder: the identity block I_{n_t}
 * occupies the n_t time slots immediately after the first n_t*Q, i.e.
 * columns [n_t*Q, n_t*(Q+1)) hold I_{n_t}. Requires T >= n_t*(Q+1).
 */
struct MimoTrainingPlan {
  int n_t = 1;

  int training_start(int Q) const { return n_t * Q; }
  int training_end(int Q) const { return n_t * (Q + 1); }
  void validate(const CorrelationProfile& profile) const;
  // writes the identity training block into X
  void pin(Matrix& X, int Q) const;
};

// Vertical stack of A diag(x_m) for m = 1..n_t: an (n_t*Q) x T matrix whose
// rows span the noiseless received row space.
Matrix signal_span_matrix(const CorrelationProfile& profile, const Matrix& X);

struct NonlinearPhaseResult {
  Matrix X_head;  // n_t x (n_t*Q), the recovered leading payload columns
  bool ok = false;
  double solve_cond = 0.0;
};

// Solves the training-anchored stacked system for each transmit antenna:
// the canonical-form columns at the training slots pin down X(:, 1:n_t*Q).
// B must be canonical with leading identity of size n_t*Q.
NonlinearPhaseResult nonlinear_phase(const CanonicalSubspace& B,
                                     const CorrelationProfile& profile,
                                     const MimoTrainingPlan& plan);

struct MimoOptions {
  // The linear phase divides by row 1 of A, as the algorithm states. The
  // least-squares alternative uses all Q rows; off by default.
  bool ls_linear_phase = false;
  double guard_tol = kGuardTol;
};

struct MimoDecodeResult {
  Matrix X;  // n_t x T, training columns pinned exactly; valid only when ok
  bool ok = false;
  DecodeDiagnostics diag;
};

// Two-phase decoder for n_t*Q <= min(T - n_t, n_r): rank-(n_t*Q) subspace
// estimate, canonical form, nonlinear phase for the leading columns, then
// per-symbol linear recovery for t > n_t*(Q+1).
MimoDecodeResult decode_mimo(const Matrix& y_noisy, const CorrelationProfile& profile,
                             const MimoTrainingPlan& plan, const MimoOptions& options = {});

// Tests linear independence of every Q-subset of the first n_t*(Q+1) columns
// of A via the subset's smallest singular value.
RecoveryReport check_recovery_mimo(const CorrelationProfile& profile, int n_t);

}  // namespace noncoh
