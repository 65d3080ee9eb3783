#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "noncoh/channel.hpp"
#include "noncoh/rng.hpp"
#include "noncoh/subspace.hpp"

using namespace noncoh;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = rng.complex_gaussian();
  return M;
}

}  // namespace

TEST_CASE("canonical form of an already-canonical basis") {
  Matrix R(2, 3);
  R << Complex(1), Complex(0), Complex(5),
       Complex(0), Complex(1), Complex(7);
  const CanonicalSubspace c = canonical_form(R);
  CHECK((c.B - R).cwiseAbs().maxCoeff() == 0.0);
  CHECK(c.pivot_cols == std::vector<int>{0, 1});
}

TEST_CASE("canonical form normalizes the leading block") {
  Matrix R(2, 3);
  R << Complex(2), Complex(0), Complex(1),
       Complex(0), Complex(3), Complex(2);
  const CanonicalSubspace c = canonical_form(R);
  Matrix expected(2, 3);
  // exact arithmetic: rows divided by their pivots
  expected << Complex(1), Complex(0), Complex(0.5),
              Complex(0), Complex(1), Complex(2.0 / 3.0);
  CHECK((c.B - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("canonical form is invariant to left multiplication") {
  Rng rng(41);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix R = random_matrix(3, 7, rng);
    Matrix M = random_matrix(3, 3, rng);
    while (std::abs(M.determinant()) < 0.1) M = random_matrix(3, 3, rng);
    const CanonicalSubspace a = canonical_form(R);
    const CanonicalSubspace b = canonical_form(M * R);
    CHECK((a.B - b.B).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("canonical form is idempotent") {
  Rng rng(43);
  const Matrix R = random_matrix(2, 5, rng);
  const CanonicalSubspace once = canonical_form(R);
  const CanonicalSubspace twice = canonical_form(once.B);
  CHECK((once.B - twice.B).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("canonical form failure modes are distinct") {
  Matrix dep(2, 3);
  dep << Complex(1), Complex(2), Complex(3),
         Complex(2), Complex(4), Complex(6);
  CHECK_THROWS_AS(canonical_form(dep), RankDeficientError);

  // full rank, but the leading 2x2 block is singular
  Matrix R(2, 3);
  R << Complex(0), Complex(1), Complex(1),
       Complex(0), Complex(2), Complex(1);
  CHECK_THROWS_AS(canonical_form(R), SingularPivotError);

  // the greedy policy picks usable pivots instead
  const CanonicalSubspace c = canonical_form(R, PivotPolicy::kGreedyConditioned);
  CHECK(c.pivot_cols.size() == 2);
  for (size_t i = 0; i < c.pivot_cols.size(); ++i) {
    for (int r = 0; r < 2; ++r) {
      const Complex expected = r == static_cast<int>(i) ? Complex(1) : Complex(0);
      CHECK(std::abs(c.B(r, c.pivot_cols[i]) - expected) == 0.0);
    }
  }
}

TEST_CASE("scale invariance of the induced subspace map") {
  // the profile-through-signal map sends x and alpha*x to the same subspace
  Rng rng(47);
  Matrix A = random_matrix(2, 5, rng);
  Vector x(5);
  for (int t = 0; t < 5; ++t) x(t) = rng.complex_gaussian();
  const Complex alpha(0.7, -2.3);
  const CanonicalSubspace a = canonical_form(A * x.asDiagonal());
  const CanonicalSubspace b = canonical_form(A * (alpha * x).asDiagonal());
  CHECK((a.B - b.B).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("signal subspace estimation") {
  Rng rng(53);

  SUBCASE("square noiseless case recovers the exact row span") {
    const Matrix Y = random_matrix(3, 6, rng);
    const Matrix U = estimate_signal_subspace(Y, 3);
    CHECK(subspace_distance(U, Y) < 1e-10);
    // rows orthonormal
    CHECK((U * U.adjoint() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("tall noiseless case recovers the generating subspace") {
    const Matrix B = random_matrix(2, 6, rng);
    const Matrix G = random_matrix(5, 2, rng);
    const Matrix U = estimate_signal_subspace(G * B, 2);
    CHECK(subspace_distance(U, B) < 1e-10);
  }

  SUBCASE("high snr estimate approaches the noiseless span") {
    Matrix A(2, 3);
    A << Complex(1), Complex(0), Complex(1),
         Complex(0), Complex(1), Complex(2);
    CorrelationProfile profile(A);
    double prev = 1.0;
    for (double snr : {1e4, 1e6}) {
      std::vector<double> dist;
      for (int rep = 0; rep < 31; ++rep) {
        Rng trial(Rng::derive(60, static_cast<std::uint64_t>(snr), rep));
        const FadingRealization fading = sample_fading(profile, 1, 2, trial);
        Matrix X(1, 3);
        for (int t = 0; t < 3; ++t) {
          // magnitudes kept in [1, 2] like a zero-excluded constellation
          const double mag = 1.0 + trial.uniform();
          const double ph = 2.0 * M_PI * trial.uniform();
          X(0, t) = Complex(mag * std::cos(ph), mag * std::sin(ph));
        }
        const Matrix Y = apply_channel(X, fading);
        const Matrix Yn = add_noise(Y, snr, trial);
        dist.push_back(subspace_distance(estimate_signal_subspace(Yn, 2), Y));
      }
      std::sort(dist.begin(), dist.end());
      const double median = dist[dist.size() / 2];
      if (snr >= 1e6) CHECK(median < 1e-2);
      CHECK(median < prev);
      prev = median;
    }
  }

  SUBCASE("dimension preconditions") {
    const Matrix Y = random_matrix(2, 4, rng);
    CHECK_THROWS_AS(estimate_signal_subspace(Y, 3), DimensionError);
    CHECK_THROWS_AS(estimate_signal_subspace(Y, 0), DimensionError);
  }
}

TEST_CASE("subspace distance closed forms") {
  Matrix e1(1, 3), e2(1, 3), diag(1, 3);
  e1 << Complex(1), Complex(0), Complex(0);
  e2 << Complex(0), Complex(1), Complex(0);
  diag << Complex(M_SQRT1_2), Complex(M_SQRT1_2), Complex(0);

  CHECK(subspace_distance(e1, e1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(subspace_distance(e1, e2) == doctest::Approx(1.0).epsilon(1e-12));
  // 45 degrees between the line e1 and the diagonal
  CHECK(subspace_distance(e1, diag) == doctest::Approx(M_SQRT1_2).epsilon(1e-12));

  Matrix wrong(1, 4);
  wrong << Complex(1), Complex(0), Complex(0), Complex(0);
  CHECK_THROWS_AS(subspace_distance(e1, wrong), DimensionError);
}

TEST_CASE("noiseless received span equals the signal-induced subspace") {
  Rng rng(71);
  Matrix A = random_matrix(2, 5, rng);
  CorrelationProfile profile(A);
  for (int rep = 0; rep < 10; ++rep) {
    const FadingRealization fading = sample_fading(profile, 1, 3, rng);
    Matrix X(1, 5);
    for (int t = 0; t < 5; ++t) X(0, t) = rng.complex_gaussian();
    const Matrix Y = apply_channel(X, fading);
    const Matrix F = A * X.row(0).asDiagonal();  // rows span the image subspace
    CHECK(subspace_distance(estimate_signal_subspace(Y, 2), F) < 1e-10);
  }
}
