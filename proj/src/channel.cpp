#include "noncoh/channel.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

namespace noncoh {

CorrelationProfile::CorrelationProfile(Matrix a) : a_(std::move(a)) {
  require(a_.rows() >= 1, "whitening matrix needs at least one row");
  require(a_.rows() < a_.cols(), "correlation rank Q must be smaller than the block length T");
  Eigen::JacobiSVD<Matrix> svd(a_);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= kRankTol * sv(0)) {
    throw RankDeficientError("whitening matrix is not full row rank");
  }
}

std::string CorrelationProfile::id() const {
  // FNV-1a over the raw entries; enough to tell profiles apart in records.
  std::uint64_t h = 1469598103934665603ULL;
  auto absorb = [&h](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  };
  absorb(static_cast<double>(a_.rows()));
  absorb(static_cast<double>(a_.cols()));
  for (Eigen::Index j = 0; j < a_.cols(); ++j) {
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
      absorb(a_(i, j).real());
      absorb(a_(i, j).imag());
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void TransmitBlock::validate() const {
  const auto T = X.cols();
  for (const auto& pin : pins) {
    require(pin.antenna >= 0 && pin.antenna < X.rows() && pin.time >= 0 && pin.time < T,
            "training pin outside the block");
    if (X(pin.antenna, pin.time) != pin.value) {
      throw Error("training pin does not match the declared value");
    }
  }
  const double avg_power = X.squaredNorm() / static_cast<double>(T);
  if (avg_power > power_budget * (1.0 + 1e-12)) {
    throw Error("average per-symbol power exceeds the declared budget");
  }
}

FadingRealization sample_fading(const CorrelationProfile& profile, int n_t, int n_r, Rng& rng) {
  require(n_t >= 1 && n_r >= 1, "antenna counts must be positive");
  const int Q = profile.rank();
  const int T = profile.block_length();
  const Matrix& A = profile.whitening();

  FadingRealization out;
  out.innovations.reserve(Q);
  for (int q = 0; q < Q; ++q) {
    Matrix s(n_r, n_t);
    for (int n = 0; n < n_r; ++n) {
      for (int m = 0; m < n_t; ++m) {
        s(n, m) = rng.complex_gaussian();
      }
    }
    out.innovations.push_back(std::move(s));
  }
  out.coefficients.reserve(T);
  for (int t = 0; t < T; ++t) {
    Matrix h = Matrix::Zero(n_r, n_t);
    for (int q = 0; q < Q; ++q) {
      h += A(q, t) * out.innovations[q];
    }
    out.coefficients.push_back(std::move(h));
  }
  return out;
}

Matrix apply_channel(const Matrix& X, const FadingRealization& fading) {
  require_dims(X.rows() == fading.n_t() && X.cols() == fading.block_length(),
               "transmit block does not match the fading realization");
  Matrix Y(fading.n_r(), X.cols());
  for (Eigen::Index t = 0; t < X.cols(); ++t) {
    Y.col(t) = fading.coefficients[static_cast<size_t>(t)] * X.col(t);
  }
  return Y;
}

Matrix apply_channel(const TransmitBlock& block, const FadingRealization& fading) {
  block.validate();
  return apply_channel(block.X, fading);
}

Matrix add_noise(const Matrix& Y, double snr, Rng& rng) {
  require(snr > 0, "snr must be positive");
  const double scale = std::sqrt(1.0 / snr);
  Matrix noisy(Y.rows(), Y.cols());
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
      noisy(i, j) = Y(i, j) + scale * rng.complex_gaussian();
    }
  }
  return noisy;
}

ReceivedBlock transmit(const TransmitBlock& block, const FadingRealization& fading,
                       double snr, Rng& rng, bool noiseless) {
  ReceivedBlock rx;
  rx.Y = apply_channel(block, fading);
  if (noiseless || std::isinf(snr)) {
    rx.Y_noisy = rx.Y;
    rx.snr = std::numeric_limits<double>::infinity();
  } else {
    rx.Y_noisy = add_noise(rx.Y, snr, rng);
    rx.snr = snr;
  }
  return rx;
}

}  // namespace noncoh
