#include "noncoh/simo.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace noncoh {

namespace {

double max_abs(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

std::string trip(const std::string& guard, int q, int t) {
  // 1-based positions in diagnostics, matching the report convention
  return guard + " (q=" + std::to_string(q + 1) + ", t=" + std::to_string(t + 1) + ")";
}

}  // namespace

SideInformation compute_side_information(const CorrelationProfile& profile) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  const Matrix& A = profile.whitening();
  const Matrix lead = A.leftCols(Q);

  Eigen::JacobiSVD<Matrix> svd(lead);
  const auto& sv = svd.singularValues();
  if (!(sv(Q - 1) > 0.0) || sv(0) / sv(Q - 1) > kCondLimit) {
    throw SingularPivotError("leading Q x Q block of the whitening matrix is singular");
  }

  SideInformation out;
  out.E = lead.partialPivLu().solve(A.rightCols(T - Q));
  return out;
}

RecoveryReport check_recovery_simo(const CorrelationProfile& profile) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  const Matrix& A = profile.whitening();

  const SideInformation side = compute_side_information(profile);
  const double scale = std::max(max_abs(side.E), 1e-300);
  const double tol = kGuardTol * scale;

  const Matrix lead = A.leftCols(Q);
  const Complex det_lead = lead.determinant();

  RecoveryReport report;
  report.passed = true;

  // Both routes compute the same quantity: by Cramer's rule E^q(t) equals the
  // determinant of the leading block with column q replaced by A(:, t),
  // divided by det A(:, 1:Q).
  auto check_entry = [&](const char* condition, int q, int t) {
    const double e_mag = std::abs(side.E(q, t - Q));
    Matrix replaced = lead;
    replaced.col(q) = A.col(t);
    const double det_ratio = std::abs(replaced.determinant() / det_lead);

    const bool e_zero = e_mag < tol;
    const bool det_zero = det_ratio < tol;
    if (e_zero != det_zero) {
      report.passed = false;
      report.failures.push_back({std::string("route-disagreement:") + condition, q + 1, t + 1,
                                 {q + 1, t + 1}, e_mag, det_ratio});
      return;
    }
    if (e_zero) {
      report.passed = false;
      report.failures.push_back({condition, q + 1, t + 1, {q + 1, t + 1}, e_mag, det_ratio});
    }
  };

  for (int q = 0; q < Q; ++q) {
    check_entry("anchor", q, T - 1);  // E^q(T) != 0
  }
  for (int t = Q; t < T - 1; ++t) {
    check_entry("chain", 0, t);  // E^1(t) != 0
  }

  report.notes.push_back(
      "transmit-side requirement: x(q) != 0 for q <= Q; enforce via a "
      "zero-excluded constellation");
  return report;
}

SimoDecodeResult decode_simo(const Matrix& y_noisy, const CorrelationProfile& profile,
                             const SimoOptions& options) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  const int n_r = static_cast<int>(y_noisy.rows());
  require_dims(y_noisy.cols() == T, "received block length does not match the profile");
  require(Q <= std::min(T - 1, n_r), "decode_simo needs Q <= min(T-1, n_r)");

  SimoDecodeResult res;
  auto& diag = res.diag;

  const SideInformation side = compute_side_information(profile);

  Eigen::JacobiSVD<Matrix> svd(y_noisy, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  diag.subspace_cond = sv(Q - 1) > 0.0 ? sv(0) / sv(Q - 1) : std::numeric_limits<double>::infinity();
  if (!(sv(Q - 1) > kRankTol * sv(0))) {
    diag.guard_trips.push_back("subspace-rank");
    return res;
  }
  const Matrix U = svd.matrixV().leftCols(Q).adjoint();

  {
    Eigen::JacobiSVD<Matrix> psvd(U.leftCols(Q));
    const auto& psv = psvd.singularValues();
    diag.pivot_cond = psv(Q - 1) > 0.0 ? psv(0) / psv(Q - 1) : std::numeric_limits<double>::infinity();
  }

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
  const Matrix& B = canon.B;

  const double tol_b = options.guard_tol * std::max(max_abs(B), 1e-300);
  const double tol_e = options.guard_tol * std::max(max_abs(side.E), 1e-300);

  res.x = Vector::Zero(T);
  res.x(T - 1) = 1.0;

  // nonlinear anchors: x(q) = E^q(T) / B^q(T)
  for (int q = 0; q < Q; ++q) {
    const Complex b = B(q, T - 1);
    if (std::abs(b) < tol_b) {
      diag.guard_trips.push_back(trip("anchor-magnitude", q, T - 1));
      continue;
    }
    res.x(q) = side.E(q, T - 1 - Q) / b;
  }

  // chained recovery for the middle positions
  for (int t = Q; t < T - 1; ++t) {
    if (options.ls_chaining) {
      Complex acc = 0.0;
      int used = 0;
      for (int q = 0; q < Q; ++q) {
        const Complex e = side.E(q, t - Q);
        if (std::abs(e) < tol_e || res.x(q) == Complex(0.0)) continue;
        acc += res.x(q) * B(q, t) / e;
        ++used;
      }
      if (used == 0) {
        diag.guard_trips.push_back(trip("chain-side-information", 0, t));
        continue;
      }
      res.x(t) = acc / static_cast<double>(used);
    } else {
      const Complex e = side.E(0, t - Q);
      if (std::abs(e) < tol_e) {
        diag.guard_trips.push_back(trip("chain-side-information", 0, t));
        continue;
      }
      res.x(t) = res.x(0) * B(0, t) / e;
    }
  }

  res.ok = diag.guard_trips.empty();
  return res;
}

SimoDecodeResult decode_simo_reduced(const Matrix& y_noisy, const CorrelationProfile& profile,
                                     int n_pilots, const SimoOptions& options) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  const int n_r = static_cast<int>(y_noisy.rows());
  require_dims(y_noisy.cols() == T, "received block length does not match the profile");
  require(n_r >= 1, "need at least one receive antenna");

  const int P = n_pilots > 0 ? n_pilots : (Q + n_r - 1) / n_r;
  require(static_cast<long>(n_r) * P >= Q,
          "underdetermined: n_r * pilots equations cannot resolve Q unknowns");
  require(T >= Q + P, "pilots must fit after the first Q positions");

  const int L = std::min(n_r, Q);  // dimension of the observable span

  SimoDecodeResult res;
  auto& diag = res.diag;

  const SideInformation side = compute_side_information(profile);

  Eigen::JacobiSVD<Matrix> svd(y_noisy, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  diag.subspace_cond = sv(L - 1) > 0.0 ? sv(0) / sv(L - 1) : std::numeric_limits<double>::infinity();
  if (!(sv(L - 1) > kRankTol * sv(0))) {
    diag.guard_trips.push_back("subspace-rank");
    return res;
  }

  CanonicalSubspace canon;
  try {
    canon = canonical_form(svd.matrixV().leftCols(L).adjoint(), PivotPolicy::kFixedLeading);
  } catch (const SingularPivotError&) {
    diag.guard_trips.push_back("pivot-singular");
    return res;
  } catch (const RankDeficientError&) {
    diag.guard_trips.push_back("subspace-rank");
    return res;
  }
  const Matrix& G = canon.B;       // L x T, leading L columns identity
  const Matrix Gq = G.leftCols(Q); // L x Q

  // stacked pilot system in u(q) = 1/x(q)
  Matrix M(L * P, Q);
  Vector rhs(L * P);
  for (int k = 0; k < P; ++k) {
    const int t = T - P + k;
    M.block(static_cast<Eigen::Index>(k) * L, 0, L, Q) =
        Gq * side.column(t).asDiagonal();
    rhs.segment(static_cast<Eigen::Index>(k) * L, L) = G.col(t);
  }

  Eigen::JacobiSVD<Matrix> msvd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& msv = msvd.singularValues();
  diag.solve_cond = msv(Q - 1) > 0.0 ? msv(0) / msv(Q - 1) : std::numeric_limits<double>::infinity();
  if (!(msv(Q - 1) > kRankTol * msv(0))) {
    diag.guard_trips.push_back("stacked-rank");
    return res;
  }
  const Vector u = msvd.solve(rhs);
  diag.residual = (M * u - rhs).norm() / std::max(1.0, rhs.norm());
  if (diag.residual > options.consistency_tol) {
    diag.guard_trips.push_back("stacked-residual");
  }

  res.x = Vector::Zero(T);
  for (int t = T - P; t < T; ++t) res.x(t) = 1.0;

  const double tol_u = options.guard_tol * std::max(u.cwiseAbs().maxCoeff(), 1e-300);
  for (int q = 0; q < Q; ++q) {
    if (std::abs(u(q)) < tol_u) {
      diag.guard_trips.push_back(trip("inverse-magnitude", q, q));
      continue;
    }
    res.x(q) = 1.0 / u(q);
  }

  // linear recovery of the remaining payload positions
  for (int t = Q; t < T - P; ++t) {
    const Vector v = Gq * (side.column(t).cwiseProduct(u));
    const double nv = v.squaredNorm();
    if (nv < tol_u * tol_u) {
      diag.guard_trips.push_back(trip("chain-magnitude", 0, t));
      continue;
    }
    res.x(t) = v.dot(G.col(t)) / nv;
  }

  res.ok = diag.guard_trips.empty();
  return res;
}

}  // namespace noncoh
