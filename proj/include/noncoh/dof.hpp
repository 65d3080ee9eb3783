#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "noncoh/channel.hpp"
#include "noncoh/common.hpp"
#include "noncoh/mimo.hpp"
#include "noncoh/rng.hpp"
#include "noncoh/simo.hpp"

namespace noncoh {

enum class DecoderId { kSimo, kSimoReduced, kMimo, kBaseline };

std::string to_string(DecoderId id);
std::optional<DecoderId> decoder_from_string(const std::string& name);

struct SystemShape {
  int n_t = 1;
  int n_r = 1;
};

/**
 * Square QAM grid per complex dimension: spacing d_min inside the [-1,1]^2
 * box, points with magnitude below zero_exclusion removed (that can only be
 * the origin, so zero_exclusion must stay below d_min/sqrt(2)), then globally
 * rescaled if needed so the mean per-symbol power is at most 1. The D-fold
 * product codebook is indexed per dimension and never materialized.
 */
class QamCodebook {
 public:
  QamCodebook(int dims, double d_min, double zero_exclusion);

  int dims() const { return dims_; }
  int axis_points() const { return axis_points_; }
  int points_per_dim() const;
  Complex point(int index) const;  // index in [0, points_per_dim())
  int nearest(Complex z) const;
  double bits() const;           // dims * log2(points_per_dim)
  double min_distance() const;   // spacing after power normalization
  double power_scale() const { return scale_; }

 private:
  int linear_index(int i, int j) const;  // axis pair -> codebook index
  int dims_;
  int axis_points_;
  bool origin_excluded_;
  double spacing_;  // scaled
  double scale_;
};

inline QamCodebook qam_codebook(int dims, double d_min, double zero_exclusion) {
  return QamCodebook(dims, d_min, zero_exclusion);
}

/**
 * Mapping between payload symbol positions in an n_t x T block and the flat
 * payload dimension order used by codebooks, sweeps and records. Pinned
 * training entries are written by place()/assemble().
 */
struct PayloadLayout {
  DecoderId decoder = DecoderId::kSimo;
  int n_t = 1, n_r = 1, T = 0, Q = 0;
  int pilots = 0;                       // trailing pilots (reduced/baseline)
  std::vector<std::pair<int, int>> positions;  // (antenna, time) per dimension

  int dims() const { return static_cast<int>(positions.size()); }
  Matrix place(const std::vector<Complex>& payload) const;
  Matrix assemble(const std::vector<int>& indices, const QamCodebook& codebook) const;
  std::vector<Complex> extract(const Matrix& X) const;
};

// pilots <= 0 selects the decoder's default (1 for simo, ceil(Q/n_r) for the
// reduced variant, Q for the baseline).
PayloadLayout make_layout(DecoderId id, const CorrelationProfile& profile,
                          SystemShape shape, int pilots = 0);

// ---- Jacobian calibration --------------------------------------------------

// A differentiable map from payload space to a feature space, both complex.
struct ForwardMap {
  int in_dim = 0;
  int out_dim = 0;
  std::function<Vector(const Vector&)> f;
};

// payload -> free entries of the canonical form of the received row span;
// these maps depend only on the profile, not on the fading draw.
ForwardMap simo_canonical_map(const CorrelationProfile& profile);
ForwardMap mimo_canonical_map(const CorrelationProfile& profile, const MimoTrainingPlan& plan);

// Central finite differences along the real axis; the canonical-form map is
// holomorphic away from singular pivots, so this is the complex derivative.
Matrix numerical_jacobian(const ForwardMap& map, const Vector& z, double step = 1e-5);

struct CalibrationResult {
  double sigma0 = 0.0;            // epsilon-quantile of the smallest singular values
  int probes = 0;
  int full_rank = 0;              // probes whose Jacobian had full column rank
  std::vector<double> sigma_min;  // per probe

  double rank_rate() const { return probes > 0 ? static_cast<double>(full_rank) / probes : 0.0; }
  // the construction's premise: full rank at rate >= 1 - epsilon
  bool premise_ok(double epsilon) const { return rank_rate() >= 1.0 - epsilon; }
};

// Probes the map at n_probe generic points (uniform in the unit box, kept
// away from zero) and returns the epsilon-quantile of the Jacobians'
// smallest singular values, so that a (1-epsilon) fraction of probes sits
// above sigma0.
CalibrationResult calibrate_sigma0(const ForwardMap& map, int n_probe, double epsilon, Rng& rng);

// Per-decoder dispatch. For the baseline the forward map includes the fading
// draw (payload -> coherently received payload entries), so every probe
// samples a fresh realization; for simo/mimo the fading-free canonical maps
// above are used.
CalibrationResult calibrate_sigma0(const CorrelationProfile& profile, DecoderId id,
                                   SystemShape shape, int n_probe, double epsilon,
                                   std::uint64_t seed);

/**
 * Executable sigma0 for the scaled-constellation sweeps. The Jacobian
 * quantile above verifies the one-to-one premise but carries no margin for
 * the receiver-side noise amplification, so sweeps built from it alone stall
 * at high block error rates. This calibration measures the end-to-end
 * amplification instead: probe trials at a reference snr record the largest
 * per-dimension payload error times sqrt(snr_ref), and sigma0 = 1/(2 q)
 * where q is the (1-epsilon) quantile. Probes that fail to decode count as
 * infinite amplification.
 */
struct NoiseMarginResult {
  double sigma0 = 0.0;
  double amp_quantile = 0.0;
  int probes = 0;
  int decode_failures = 0;
  double snr_ref = 0.0;
};

NoiseMarginResult calibrate_noise_margin(const CorrelationProfile& profile, DecoderId id,
                                         SystemShape shape, int n_probe, double epsilon,
                                         double snr_ref, std::uint64_t seed);

// ---- Monte Carlo harness ---------------------------------------------------

struct DofConfig {
  double delta = 0.05;    // d_min exponent backoff, in (0, 1/2)
  double sigma0 = 0.0;    // <= 0 means: calibrate before sweeping
  double epsilon = 0.05;  // outage fraction for the sigma0 quantile
  std::vector<double> snr_grid;  // linear SNR values
  int trials_per_point = 2000;
  bool noiseless = false;
  double zero_exclusion_frac = 0.5;  // zero_exclusion = frac * d_min

  void validate() const;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::string profile_id;
  DecoderId decoder = DecoderId::kSimo;
  double snr = 0.0;
  bool noiseless = false;
  std::vector<int> tx, rx;  // payload indices per dimension
  bool success = false;     // all payload indices match
  int symbol_errors = 0;
  DecodeDiagnostics diag;
};

struct SweepRow {
  double snr = 0.0;
  double d_min = 0.0;
  int grid = 0;  // constellation points per complex dimension
  double bler = 0.0;
  double rate_bits = 0.0;  // dims * log2(grid)
  int dims = 0;
  double ser = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  int dims = 0;
  DecoderId decoder = DecoderId::kSimo;
  double sigma0 = 0.0;
};

// Runs one end-to-end trial: draw payload, pin training, sample fading,
// apply channel and noise, decode, slice to the nearest codeword per
// dimension. Fully determined by trial_seed.
TrialRecord run_trial(const PayloadLayout& layout, const CorrelationProfile& profile,
                      const QamCodebook& codebook, double snr, bool noiseless,
                      std::uint64_t trial_seed);

// SNR sweep with d_min = 1 / (sigma0 * snr^(1/2 - delta)) at every grid
// point. Decoder failures count as block errors; the sweep never aborts.
// When records is non-null every trial record is appended to it.
SweepTable run_sweep(const DofConfig& config, const CorrelationProfile& profile,
                     DecoderId id, SystemShape shape, std::uint64_t seed,
                     std::vector<TrialRecord>* records = nullptr);

// Least-squares slope of achieved rate (nats) against ln(snr) over rows with
// bler <= error_ceiling and a non-degenerate grid. Needs >= 3 such rows.
double estimate_dof(const SweepTable& table, double error_ceiling = 0.05);

// Classical pilot-based coherent receiver for SIMO blocks: least-squares
// innovation estimate from pilot_count trailing pilots (>= Q), then
// maximum-ratio detection of the remaining T - pilot_count symbols.
SimoDecodeResult baseline_training_decoder(const Matrix& y_noisy,
                                           const CorrelationProfile& profile,
                                           int pilot_count = 0,
                                           const SimoOptions& options = {});

}  // namespace noncoh
