#pragma once

#include <string>
#include <vector>

#include "noncoh/common.hpp"
#include "noncoh/rng.hpp"

namespace noncoh {

/**
 * Q x T whitening matrix. Fading trajectories between every antenna pair are
 * linear combinations of Q independent innovations through the rows of A, so
 * the block correlation matrix K_H = A^H A has rank exactly Q < T.
 */
class CorrelationProfile {
 public:
  // Validates Q < T and full row rank (smallest singular value above
  // kRankTol relative to the largest); throws RankDeficientError otherwise.
  explicit CorrelationProfile(Matrix a);

  const Matrix& whitening() const { return a_; }
  int rank() const { return static_cast<int>(a_.rows()); }          // Q
  int block_length() const { return static_cast<int>(a_.cols()); }  // T
  Matrix covariance() const { return a_.adjoint() * a_; }           // K_H

  // Short content hash used to tag trial records.
  std::string id() const;

 private:
  Matrix a_;
};

struct TrainingPin {
  int antenna = 0;  // 0-based transmit antenna
  int time = 0;     // 0-based position in the block
  Complex value{1.0, 0.0};
};

/// n_t x T signal matrix with pinned training entries and a power budget.
struct TransmitBlock {
  Matrix X;
  std::vector<TrainingPin> pins;
  double power_budget = 1.0;  // average per-symbol power bound

  // Pinned entries must match exactly; block-average power per channel use
  // must not exceed the budget (within 1e-12 relative slack).
  void validate() const;
};

/**
 * One draw of the fading process. innovations[q] holds s^q as an n_r x n_t
 * matrix; coefficients[t](n, m) = sum_q A(q, t) * innovations[q](n, m), so
 * every per-pair trajectory lies in the row span of A.
 */
struct FadingRealization {
  std::vector<Matrix> innovations;   // Q entries, each n_r x n_t
  std::vector<Matrix> coefficients;  // T entries, each n_r x n_t

  int n_r() const { return coefficients.empty() ? 0 : static_cast<int>(coefficients[0].rows()); }
  int n_t() const { return coefficients.empty() ? 0 : static_cast<int>(coefficients[0].cols()); }
  int block_length() const { return static_cast<int>(coefficients.size()); }
};

struct ReceivedBlock {
  Matrix Y;        // noiseless, n_r x T
  Matrix Y_noisy;  // Y + W
  double snr = 0;  // linear; infinity() when noiseless
};

// i.i.d. CN(0,1) innovations expanded through the whitening matrix.
// Identical seed state gives identical output bit for bit.
FadingRealization sample_fading(const CorrelationProfile& profile, int n_t, int n_r, Rng& rng);

// Column t of the result is coefficients[t] * x(t).
Matrix apply_channel(const Matrix& X, const FadingRealization& fading);
Matrix apply_channel(const TransmitBlock& block, const FadingRealization& fading);

// Adds i.i.d. CN(0, 1/snr) noise; snr must be positive.
Matrix add_noise(const Matrix& Y, double snr, Rng& rng);

// apply_channel + add_noise; infinite snr (or noiseless=true) skips the noise
// draw entirely so Y_noisy == Y exactly.
ReceivedBlock transmit(const TransmitBlock& block, const FadingRealization& fading,
                       double snr, Rng& rng, bool noiseless = false);

}  // namespace noncoh
