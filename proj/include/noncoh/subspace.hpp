#pragma once

#include <vector>

#include "noncoh/common.hpp"

namespace noncoh {

enum class PivotPolicy {
  kFixedLeading,       // pivots are columns 0..L-1, the convention the decoders rely on
  kGreedyConditioned,  // pivots chosen to maximize the pivot block's smallest singular value
};

/**
 * Canonical representation of an L-dimensional subspace of C^T: the unique
 * row basis whose submatrix at the pivot columns is the identity.
 */
struct CanonicalSubspace {
  Matrix B;                    // L x T
  std::vector<int> pivot_cols; // ascending, size L; B(:, pivot_cols[i]) == e_i

  int dim() const { return static_cast<int>(B.rows()); }
  int ambient() const { return static_cast<int>(B.cols()); }
};

// B = C^-1 R where C is the pivot-column block of R. Throws
// RankDeficientError when R is not full row rank and SingularPivotError when
// the fixed-leading pivot block is singular (condition number > kCondLimit);
// the latter is retryable with the greedy policy.
CanonicalSubspace canonical_form(const Matrix& R,
                                 PivotPolicy policy = PivotPolicy::kFixedLeading);

// Rows are the L right singular vectors of y_noisy with the largest singular
// values: an orthonormal basis of the dominant rank-L row space.
Matrix estimate_signal_subspace(const Matrix& y_noisy, int L);

// Sine of the largest principal angle between the row spans; 0 iff equal,
// 1 for orthogonal subspaces. Row counts may differ.
double subspace_distance(const Matrix& U, const Matrix& V);

}  // namespace noncoh
