#include "noncoh/subspace.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace noncoh {

namespace {

double condition_number(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(sv.size() - 1);
}

// Greedy pivot selection: at each step add the column that maximizes the
// smallest singular value of the grown pivot block.
std::vector<int> greedy_pivots(const Matrix& R) {
  const int L = static_cast<int>(R.rows());
  const int T = static_cast<int>(R.cols());
  std::vector<int> chosen;
  std::vector<bool> used(T, false);
  Matrix block(L, L);
  for (int k = 0; k < L; ++k) {
    int best = -1;
    double best_smin = -1.0;
    for (int c = 0; c < T; ++c) {
      if (used[c]) continue;
      block.col(k) = R.col(c);
      Eigen::JacobiSVD<Matrix> svd(block.leftCols(k + 1));
      const double smin = svd.singularValues()(k);
      if (smin > best_smin) {
        best_smin = smin;
        best = c;
      }
    }
    chosen.push_back(best);
    used[best] = true;
    block.col(k) = R.col(best);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

CanonicalSubspace canonical_form(const Matrix& R, PivotPolicy policy) {
  const int L = static_cast<int>(R.rows());
  const int T = static_cast<int>(R.cols());
  require_dims(L >= 1 && L <= T, "basis matrix must be L x T with L <= T");

  {
    Eigen::JacobiSVD<Matrix> svd(R);
    const auto& sv = svd.singularValues();
    if (sv(L - 1) <= kRankTol * sv(0)) {
      throw RankDeficientError("row basis is rank deficient");
    }
  }

  std::vector<int> pivots(L);
  if (policy == PivotPolicy::kFixedLeading) {
    std::iota(pivots.begin(), pivots.end(), 0);
  } else {
    pivots = greedy_pivots(R);
  }

  Matrix C(L, L);
  for (int k = 0; k < L; ++k) C.col(k) = R.col(pivots[k]);
  if (!(condition_number(C) < kCondLimit)) {
    throw SingularPivotError("pivot block is numerically singular");
  }

  CanonicalSubspace out;
  out.B = C.partialPivLu().solve(R);
  // pin the identity block exactly; the solve leaves rounding residue there
  for (int k = 0; k < L; ++k) {
    out.B.col(pivots[k]) = Vector::Unit(L, k);
  }
  out.pivot_cols = std::move(pivots);
  return out;
}

Matrix estimate_signal_subspace(const Matrix& y_noisy, int L) {
  require_dims(L >= 1 && L <= std::min(y_noisy.rows(), y_noisy.cols()),
               "subspace dimension exceeds min(n_r, T)");
  Eigen::JacobiSVD<Matrix> svd(y_noisy, Eigen::ComputeThinV);
  return svd.matrixV().leftCols(L).adjoint();
}

double subspace_distance(const Matrix& U, const Matrix& V) {
  require_dims(U.cols() == V.cols(), "subspaces live in different ambient dimensions");
  require_dims(U.rows() >= 1 && V.rows() >= 1, "empty basis");

  // Orthonormalize the row bases, then the singular values of Qu Qv^H are
  // the cosines of the principal angles.
  const auto orth = [](const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= kRankTol * sv(0)) {
      throw RankDeficientError("basis is rank deficient");
    }
    return Matrix(svd.matrixV().leftCols(M.rows()).adjoint());
  };
  Matrix Qs = orth(U);
  Matrix Ql = orth(V);
  if (Qs.rows() > Ql.rows()) std::swap(Qs, Ql);
  // residual of the smaller basis after projecting onto the larger span; its
  // largest singular value is the sine itself, accurate down to zero angles
  const Matrix D = Qs - (Qs * Ql.adjoint()) * Ql;
  Eigen::JacobiSVD<Matrix> svd(D);
  return std::clamp(svd.singularValues()(0), 0.0, 1.0);
}

}  // namespace noncoh
