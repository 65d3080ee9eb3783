#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "noncoh/channel.hpp"
#include "noncoh/mimo.hpp"
#include "noncoh/subspace.hpp"

using namespace noncoh;

namespace {

Matrix random_profile_matrix(int Q, int T, Rng& rng) {
  Matrix A(Q, T);
  for (int q = 0; q < Q; ++q)
    for (int t = 0; t < T; ++t) A(q, t) = rng.complex_gaussian();
  return A;
}

Complex nonzero_gaussian(Rng& rng) {
  Complex v;
  do {
    v = rng.complex_gaussian();
  } while (std::abs(v) < 0.05);
  return v;
}

// random payload with the identity training block pinned
Matrix random_signal(const CorrelationProfile& profile, const MimoTrainingPlan& plan, Rng& rng) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  Matrix X(plan.n_t, T);
  for (int m = 0; m < plan.n_t; ++m)
    for (int t = 0; t < T; ++t) X(m, t) = nonzero_gaussian(rng);
  plan.pin(X, Q);
  return X;
}

}  // namespace

TEST_CASE("signal span matrix construction") {
  SUBCASE("single antenna reduces to A diag(x)") {
    Rng rng(3);
    const CorrelationProfile profile(random_profile_matrix(2, 5, rng));
    Matrix X(1, 5);
    for (int t = 0; t < 5; ++t) X(0, t) = rng.complex_gaussian();
    const Matrix R = signal_span_matrix(profile, X);
    CHECK((R - profile.whitening() * X.row(0).asDiagonal()).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("rank-one all-ones profile returns the transmit rows") {
    const CorrelationProfile profile(Matrix::Ones(1, 4));
    Matrix X(2, 4);
    X << Complex(1), Complex(2), Complex(1), Complex(0),
         Complex(3), Complex(5), Complex(0), Complex(1);
    const Matrix R = signal_span_matrix(profile, X);
    CHECK((R - X).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("stacking oracle") {
    const CorrelationProfile profile(Matrix::Ones(1, 4));
    Matrix X(2, 4);
    X << Complex(1), Complex(2), Complex(1), Complex(0),
         Complex(3), Complex(5), Complex(0), Complex(1);
    Matrix expected(2, 4);
    expected << Complex(1), Complex(2), Complex(1), Complex(0),
                Complex(3), Complex(5), Complex(0), Complex(1);
    CHECK((signal_span_matrix(profile, X) - expected).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("nonlinear phase hand oracle") {
  // flat fading, n_t = 2, T = 4: R = X, C_R = [[1,2],[3,5]]
  const CorrelationProfile profile(Matrix::Ones(1, 4));
  const MimoTrainingPlan plan{2};
  Matrix X(2, 4);
  X << Complex(1), Complex(2), Complex(1), Complex(0),
       Complex(3), Complex(5), Complex(0), Complex(1);

  const CanonicalSubspace canon = canonical_form(signal_span_matrix(profile, X));
  Matrix B_expected(2, 4);
  B_expected << Complex(1), Complex(0), Complex(-5), Complex(2),
                Complex(0), Complex(1), Complex(3), Complex(-1);
  CHECK((canon.B - B_expected).cwiseAbs().maxCoeff() < 1e-12);

  const NonlinearPhaseResult res = nonlinear_phase(canon, profile, plan);
  REQUIRE(res.ok);
  CHECK(std::abs(res.X_head(0, 0) - Complex(1)) < 1e-12);
  CHECK(std::abs(res.X_head(0, 1) - Complex(2)) < 1e-12);
  CHECK(std::abs(res.X_head(1, 0) - Complex(3)) < 1e-12);
  CHECK(std::abs(res.X_head(1, 1) - Complex(5)) < 1e-12);
}

TEST_CASE("identity leading block reads the head straight off the canonical form") {
  Rng rng(11);
  const CorrelationProfile profile(random_profile_matrix(1, 5, rng));
  const Matrix& A = profile.whitening();
  const MimoTrainingPlan plan{2};
  // choose X(1:2) so that R(1:2) = I, then B = R and the head is recovered
  // exactly as placed
  Matrix X(2, 5);
  for (int m = 0; m < 2; ++m)
    for (int t = 0; t < 5; ++t) X(m, t) = nonzero_gaussian(rng);
  X(0, 0) = 1.0 / A(0, 0);
  X(0, 1) = 0.0;
  X(1, 0) = 0.0;
  X(1, 1) = 1.0 / A(0, 1);
  plan.pin(X, 1);

  const Matrix R = signal_span_matrix(profile, X);
  CHECK((R.leftCols(2) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  const CanonicalSubspace canon = canonical_form(R);
  const NonlinearPhaseResult res = nonlinear_phase(canon, profile, plan);
  REQUIRE(res.ok);
  CHECK((res.X_head - X.leftCols(2)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("mimo equivalence with the simo decoder") {
  // n_t = 1 with T = Q + 1 puts the single training slot at t = T for both
  Rng rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    const CorrelationProfile profile(random_profile_matrix(2, 3, rng));
    if (!check_recovery_simo(profile).passed) continue;
    const MimoTrainingPlan plan{1};
    Matrix X(1, 3);
    X << nonzero_gaussian(rng), nonzero_gaussian(rng), Complex(1);

    const FadingRealization fading = sample_fading(profile, 1, 2, rng);
    const Matrix Y = apply_channel(X, fading);

    const SimoDecodeResult simo = decode_simo(Y, profile);
    const MimoDecodeResult mimo = decode_mimo(Y, profile, plan);
    REQUIRE(simo.ok);
    REQUIRE(mimo.ok);
    CHECK((mimo.X.row(0).transpose() - simo.x).norm() < 1e-9);
  }
}

TEST_CASE("mimo equivalence with the simo decoder on longer blocks") {
  // pin both training conventions (t = Q+1 for the plan, t = T for simo) so
  // the two decoders see consistent inputs including the linear phase
  Rng rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const CorrelationProfile profile(random_profile_matrix(2, 5, rng));
    if (!check_recovery_simo(profile).passed) continue;
    const MimoTrainingPlan plan{1};
    Matrix X(1, 5);
    for (int t = 0; t < 5; ++t) X(0, t) = nonzero_gaussian(rng);
    X(0, 2) = 1.0;  // the plan's training slot (n_t*Q = 2)
    X(0, 4) = 1.0;  // the simo pilot

    const FadingRealization fading = sample_fading(profile, 1, 3, rng);
    const Matrix Y = apply_channel(X, fading);

    const SimoDecodeResult simo = decode_simo(Y, profile);
    const MimoDecodeResult mimo = decode_mimo(Y, profile, plan);
    REQUIRE(simo.ok);
    REQUIRE(mimo.ok);
    CHECK((mimo.X.row(0).transpose() - simo.x).norm() < 1e-9);
    CHECK((mimo.X.row(0).transpose() - X.row(0).transpose()).norm() < 1e-9);
  }
}

TEST_CASE("full mimo round trip on the flat-fading fixture") {
  // Q=1, n_t=2, T=6: payload is 8 symbols per block
  const CorrelationProfile profile(Matrix::Ones(1, 6));
  const MimoTrainingPlan plan{2};
  Rng rng(29);
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix X = random_signal(profile, plan, rng);
    const FadingRealization fading = sample_fading(profile, 2, 3, rng);
    const Matrix Y = apply_channel(X, fading);
    const MimoDecodeResult res = decode_mimo(Y, profile, plan);
    REQUIRE(res.ok);
    CHECK((res.X - X).cwiseAbs().maxCoeff() < 1e-9 * X.cwiseAbs().maxCoeff());
  }
  // payload accounting: n_t (T - n_t) = 8 complex symbols
  CHECK(2 * (6 - 2) == 8);
}

TEST_CASE("span of the noiseless received block matches the span matrix") {
  Rng rng(37);
  const CorrelationProfile profile(random_profile_matrix(2, 8, rng));
  const MimoTrainingPlan plan{2};
  const Matrix X = random_signal(profile, plan, rng);
  const Matrix R = signal_span_matrix(profile, X);
  const FadingRealization fading = sample_fading(profile, 2, 5, rng);
  const Matrix Y = apply_channel(X, fading);
  CHECK(subspace_distance(estimate_signal_subspace(Y, 4), R) < 1e-10);
}

TEST_CASE("decoded payload is invariant to the fading draw") {
  Rng rng(41);
  const CorrelationProfile profile(random_profile_matrix(2, 8, rng));
  const MimoTrainingPlan plan{2};
  const Matrix X = random_signal(profile, plan, rng);
  Rng f1(1001), f2(2002);
  const FadingRealization fa = sample_fading(profile, 2, 4, f1);
  const FadingRealization fb = sample_fading(profile, 2, 4, f2);
  const MimoDecodeResult ra = decode_mimo(apply_channel(X, fa), profile, plan);
  const MimoDecodeResult rb = decode_mimo(apply_channel(X, fb), profile, plan);
  REQUIRE(ra.ok);
  REQUIRE(rb.ok);
  CHECK((ra.X - rb.X).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("training-anchored system is consistent at the true signal") {
  // plugging the true X(1:n_t Q) into the stacked system built from the true
  // canonical form leaves no residual
  Rng rng(43);
  const CorrelationProfile profile(random_profile_matrix(2, 8, rng));
  const MimoTrainingPlan plan{2};
  const Matrix X = random_signal(profile, plan, rng);
  const CanonicalSubspace canon = canonical_form(signal_span_matrix(profile, X));
  const Matrix& A = profile.whitening();
  const int L = 4;
  for (int m = 0; m < 2; ++m) {
    for (int t = plan.training_start(2); t < plan.training_end(2); ++t) {
      const Vector lhs = A.col(t) * X(m, t);
      const Vector rhs =
          A.leftCols(L) * canon.B.col(t).cwiseProduct(X.row(m).head(L).transpose());
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("mimo recovery condition checks") {
  SUBCASE("rank-one all-ones profile passes") {
    const CorrelationProfile profile(Matrix::Ones(1, 6));
    const RecoveryReport report = check_recovery_mimo(profile, 2);
    CHECK(report.passed);
  }

  SUBCASE("duplicated columns inside the training window are caught") {
    Rng rng(47);
    Matrix A = random_profile_matrix(2, 8, rng);
    A.col(3) = A.col(1);  // both inside the first n_t(Q+1) = 6 columns
    const RecoveryReport report = check_recovery_mimo(CorrelationProfile(A), 2);
    CHECK_FALSE(report.passed);
    REQUIRE_FALSE(report.failures.empty());
    bool found = false;
    for (const auto& f : report.failures) {
      if (f.indices == std::vector<int>{2, 4}) found = true;
    }
    CHECK(found);
  }

  SUBCASE("random profiles pass with probability one") {
    Rng rng(53);
    int failed = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const CorrelationProfile profile(random_profile_matrix(2, 6, rng));
      if (!check_recovery_mimo(profile, 2).passed) ++failed;
    }
    CHECK(failed == 0);
  }
}

TEST_CASE("training plan preconditions") {
  Rng rng(59);
  const CorrelationProfile profile(random_profile_matrix(2, 5, rng));
  const MimoTrainingPlan plan{2};  // needs T >= 6
  CHECK_THROWS_AS(plan.validate(profile), std::invalid_argument);
  CHECK_THROWS_AS(check_recovery_mimo(profile, 2), std::invalid_argument);

  const CorrelationProfile ok_profile(random_profile_matrix(2, 8, rng));
  CHECK_NOTHROW(MimoTrainingPlan{2}.validate(ok_profile));
  // n_r too small for the subspace estimate
  const Matrix Y = Matrix::Zero(3, 8);
  CHECK_THROWS_AS(decode_mimo(Y, ok_profile, MimoTrainingPlan{2}), std::invalid_argument);
}

TEST_CASE("ls linear phase agrees on noiseless data") {
  Rng rng(61);
  const CorrelationProfile profile(random_profile_matrix(2, 8, rng));
  const MimoTrainingPlan plan{2};
  const Matrix X = random_signal(profile, plan, rng);
  const FadingRealization fading = sample_fading(profile, 2, 4, rng);
  const Matrix Y = apply_channel(X, fading);
  MimoOptions ls;
  ls.ls_linear_phase = true;
  const MimoDecodeResult a = decode_mimo(Y, profile, plan);
  const MimoDecodeResult b = decode_mimo(Y, profile, plan, ls);
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  CHECK((a.X - b.X).cwiseAbs().maxCoeff() < 1e-9);
}
