#include "noncoh/mimo.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace noncoh {

void MimoTrainingPlan::validate(const CorrelationProfile& profile) const {
  require(n_t >= 1, "need at least one transmit antenna");
  require(profile.block_length() >= training_end(profile.rank()),
          "block too short for the training plan: T >= n_t*(Q+1) required");
}

void MimoTrainingPlan::pin(Matrix& X, int Q) const {
  require_dims(X.rows() == n_t && X.cols() >= training_end(Q),
               "signal matrix does not fit the training plan");
  X.block(0, training_start(Q), n_t, n_t) = Matrix::Identity(n_t, n_t);
}

Matrix signal_span_matrix(const CorrelationProfile& profile, const Matrix& X) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  require_dims(X.cols() == T, "signal block length does not match the profile");
  const int n_t = static_cast<int>(X.rows());

  Matrix R(static_cast<Eigen::Index>(n_t) * Q, T);
  for (int m = 0; m < n_t; ++m) {
    R.block(static_cast<Eigen::Index>(m) * Q, 0, Q, T) =
        profile.whitening() * X.row(m).asDiagonal();
  }
  return R;
}

NonlinearPhaseResult nonlinear_phase(const CanonicalSubspace& B,
                                     const CorrelationProfile& profile,
                                     const MimoTrainingPlan& plan) {
  const int Q = profile.rank();
  const int n_t = plan.n_t;
  const int L = n_t * Q;
  plan.validate(profile);
  require_dims(B.dim() == L && B.ambient() == profile.block_length(),
               "canonical subspace dimension does not match n_t*Q");
  for (int k = 0; k < L; ++k) {
    require(B.pivot_cols[static_cast<size_t>(k)] == k,
            "the training algebra needs the leading-pivot canonical form");
  }

  const Matrix& A = profile.whitening();
  const Matrix A_head = A.leftCols(L);  // Q x L

  // One stacked system, shared by every antenna: rows t over the training
  // slots of A_head diag(B(:,t)); the right-hand sides encode the identity
  // training block.
  Matrix M(L, L);
  Matrix rhs = Matrix::Zero(L, n_t);
  for (int k = 0; k < n_t; ++k) {
    const int t = plan.training_start(Q) + k;
    M.block(static_cast<Eigen::Index>(k) * Q, 0, Q, L) = A_head * B.B.col(t).asDiagonal();
    rhs.block(static_cast<Eigen::Index>(k) * Q, k, Q, 1) = A.col(t);
  }

  NonlinearPhaseResult res;
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  res.solve_cond = sv(L - 1) > 0.0 ? sv(0) / sv(L - 1) : std::numeric_limits<double>::infinity();
  if (!(sv(L - 1) > kRankTol * sv(0))) {
    return res;  // singular stacked system, flagged via ok = false
  }
  res.X_head = svd.solve(rhs).transpose();  // row m holds x_m(1 : n_t*Q)
  res.ok = true;
  return res;
}

MimoDecodeResult decode_mimo(const Matrix& y_noisy, const CorrelationProfile& profile,
                             const MimoTrainingPlan& plan, const MimoOptions& options) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  const int n_t = plan.n_t;
  const int n_r = static_cast<int>(y_noisy.rows());
  const int L = n_t * Q;
  plan.validate(profile);
  require_dims(y_noisy.cols() == T, "received block length does not match the profile");
  require(L <= std::min(T - n_t, n_r), "decode_mimo needs n_t*Q <= min(T - n_t, n_r)");

  MimoDecodeResult res;
  auto& diag = res.diag;

  Eigen::JacobiSVD<Matrix> svd(y_noisy, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  diag.subspace_cond = sv(L - 1) > 0.0 ? sv(0) / sv(L - 1) : std::numeric_limits<double>::infinity();
  if (!(sv(L - 1) > kRankTol * sv(0))) {
    diag.guard_trips.push_back("subspace-rank");
    return res;
  }
  const Matrix U = svd.matrixV().leftCols(L).adjoint();

  CanonicalSubspace canon;
  try {
    canon = canonical_form(U, PivotPolicy::kFixedLeading);
  } catch (const SingularPivotError&) {
    diag.guard_trips.push_back("pivot-singular");
    return res;
  } catch (const RankDeficientError&) {
    diag.guard_trips.push_back("subspace-rank");
    return res;
  }

  const NonlinearPhaseResult head = nonlinear_phase(canon, profile, plan);
  diag.solve_cond = head.solve_cond;
  if (!head.ok) {
    diag.guard_trips.push_back("nonlinear-singular");
    return res;
  }

  const Matrix& A = profile.whitening();
  const Matrix A_head = A.leftCols(L);
  const double tol_a = options.guard_tol * std::max(A.cwiseAbs().maxCoeff(), 1e-300);

  res.X = Matrix::Zero(n_t, T);
  res.X.leftCols(L) = head.X_head;
  plan.pin(res.X, Q);

  for (int t = plan.training_end(Q); t < T; ++t) {
    const double gate = options.ls_linear_phase ? A.col(t).norm() : std::abs(A(0, t));
    if (gate < tol_a) {
      diag.guard_trips.push_back("linear-phase-magnitude t=" + std::to_string(t + 1));
      continue;
    }
    for (int m = 0; m < n_t; ++m) {
      // A(:,t) x_m(t) = A_head diag(B(:,t)) x_m(1:L)^T; the left side is rank
      // one in the scalar x_m(t)
      const Vector rhs = A_head * canon.B.col(t).cwiseProduct(head.X_head.row(m).transpose());
      if (options.ls_linear_phase) {
        res.X(m, t) = A.col(t).dot(rhs) / A.col(t).squaredNorm();
      } else {
        res.X(m, t) = rhs(0) / A(0, t);
      }
    }
  }

  res.ok = diag.guard_trips.empty();
  return res;
}

RecoveryReport check_recovery_mimo(const CorrelationProfile& profile, int n_t) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  require(n_t >= 1, "need at least one transmit antenna");
  const int W = n_t * (Q + 1);
  require(T >= W, "profile too short: T >= n_t*(Q+1) required");

  const Matrix& A = profile.whitening();
  const double scale = std::max(A.leftCols(W).cwiseAbs().maxCoeff(), 1e-300);

  RecoveryReport report;
  report.passed = true;

  // every Q-subset of the first n_t*(Q+1) columns must be independent
  std::vector<int> idx(Q);
  for (int i = 0; i < Q; ++i) idx[i] = i;
  Matrix subset(Q, Q);
  while (true) {
    for (int i = 0; i < Q; ++i) subset.col(i) = A.col(idx[i]);
    Eigen::JacobiSVD<Matrix> svd(subset);
    const auto& sv = svd.singularValues();
    if (!(sv(Q - 1) > kRankTol * std::max(sv(0), scale))) {
      ConditionFailure f;
      f.condition = "column-subset";
      for (int i : idx) f.indices.push_back(i + 1);
      f.magnitude = sv(Q - 1);
      report.failures.push_back(std::move(f));
      report.passed = false;
    }
    // next combination
    int i = Q - 1;
    while (i >= 0 && idx[i] == W - Q + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < Q; ++j) idx[j] = idx[j - 1] + 1;
  }

  report.notes.push_back(
      "transmit-side requirement: payload rows must follow a continuous "
      "distribution over n_t-dimensional subspaces; QAM payloads approximate "
      "this and are not checkable from A");
  return report;
}

}  // namespace noncoh
