#include "noncoh/dof.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "noncoh/subspace.hpp"

namespace noncoh {

std::string to_string(DecoderId id) {
  switch (id) {
    case DecoderId::kSimo: return "simo";
    case DecoderId::kSimoReduced: return "simo-reduced";
    case DecoderId::kMimo: return "mimo";
    case DecoderId::kBaseline: return "baseline";
  }
  return "?";
}

std::optional<DecoderId> decoder_from_string(const std::string& name) {
  if (name == "simo") return DecoderId::kSimo;
  if (name == "simo-reduced") return DecoderId::kSimoReduced;
  if (name == "mimo") return DecoderId::kMimo;
  if (name == "baseline") return DecoderId::kBaseline;
  return std::nullopt;
}

// ---- QamCodebook ------------------------------------------------------------

QamCodebook::QamCodebook(int dims, double d_min, double zero_exclusion) : dims_(dims) {
  require(dims >= 1, "codebook needs at least one dimension");
  require(d_min > 0.0, "d_min must be positive");
  require(zero_exclusion >= 0.0 && zero_exclusion < d_min * 0.70710678,
          "zero_exclusion must stay below d_min/sqrt(2) so only the origin is removable");

  axis_points_ = static_cast<int>(std::floor(2.0 / d_min));
  if (axis_points_ < 1) {
    throw Error("codebook is empty: d_min exceeds the unit box");
  }
  origin_excluded_ = (axis_points_ % 2 == 1) && zero_exclusion > 0.0;
  if (axis_points_ == 1 && origin_excluded_) {
    throw Error("codebook is empty: zero exclusion removed the only point");
  }

  // mean power of the surviving grid; the origin contributes nothing, so the
  // removal only shrinks the denominator
  const int m = axis_points_;
  double axis_sq = 0.0;
  for (int i = 0; i < m; ++i) {
    const double v = (i - (m - 1) / 2.0) * d_min;
    axis_sq += v * v;
  }
  const int count = points_per_dim();
  const double mean_power = count > 0 ? 2.0 * m * axis_sq / count : 0.0;
  scale_ = mean_power > 1.0 ? std::sqrt(1.0 / mean_power) : 1.0;
  spacing_ = d_min * scale_;
}

int QamCodebook::points_per_dim() const {
  return axis_points_ * axis_points_ - (origin_excluded_ ? 1 : 0);
}

int QamCodebook::linear_index(int i, int j) const {
  int k = i * axis_points_ + j;
  if (origin_excluded_) {
    const int c = (axis_points_ - 1) / 2;
    const int hole = c * axis_points_ + c;
    if (k > hole) --k;
  }
  return k;
}

Complex QamCodebook::point(int index) const {
  require(index >= 0 && index < points_per_dim(), "codebook index out of range");
  int k = index;
  if (origin_excluded_) {
    const int c = (axis_points_ - 1) / 2;
    if (k >= c * axis_points_ + c) ++k;
  }
  const int i = k / axis_points_;
  const int j = k % axis_points_;
  const double half = (axis_points_ - 1) / 2.0;
  return {(i - half) * spacing_, (j - half) * spacing_};
}

int QamCodebook::nearest(Complex z) const {
  const int m = axis_points_;
  const double half = (m - 1) / 2.0;
  auto snap = [&](double v) {
    const long i = std::lround(v / spacing_ + half);
    return static_cast<int>(std::clamp(i, 0L, static_cast<long>(m - 1)));
  };
  int i = snap(z.real());
  int j = snap(z.imag());
  const int c = (m - 1) / 2;
  if (!(origin_excluded_ && i == c && j == c)) {
    return linear_index(i, j);
  }
  // the snap landed on the removed origin: pick the best surviving neighbor
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int di = -1; di <= 1; ++di) {
    for (int dj = -1; dj <= 1; ++dj) {
      const int ni = i + di, nj = j + dj;
      if (ni < 0 || nj < 0 || ni >= m || nj >= m) continue;
      if (ni == c && nj == c) continue;
      const double half2 = (m - 1) / 2.0;
      const Complex p{(ni - half2) * spacing_, (nj - half2) * spacing_};
      const double d = std::abs(z - p);
      if (d < best_dist - 1e-15 ||
          (std::abs(d - best_dist) <= 1e-15 && linear_index(ni, nj) < best)) {
        best_dist = d;
        best = linear_index(ni, nj);
      }
    }
  }
  return best;
}

double QamCodebook::bits() const { return dims_ * std::log2(static_cast<double>(points_per_dim())); }

double QamCodebook::min_distance() const { return spacing_; }

// ---- PayloadLayout ----------------------------------------------------------

PayloadLayout make_layout(DecoderId id, const CorrelationProfile& profile,
                          SystemShape shape, int pilots) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  require(shape.n_r >= 1, "need at least one receive antenna");

  PayloadLayout layout;
  layout.decoder = id;
  layout.n_t = shape.n_t;
  layout.n_r = shape.n_r;
  layout.T = T;
  layout.Q = Q;

  switch (id) {
    case DecoderId::kSimo: {
      require(shape.n_t == 1, "simo layout needs n_t == 1");
      require(Q <= std::min(T - 1, shape.n_r), "simo regime needs Q <= min(T-1, n_r)");
      layout.pilots = 1;
      for (int t = 0; t < T - 1; ++t) layout.positions.emplace_back(0, t);
      break;
    }
    case DecoderId::kSimoReduced: {
      require(shape.n_t == 1, "simo layout needs n_t == 1");
      const int P = pilots > 0 ? pilots : (Q + shape.n_r - 1) / shape.n_r;
      require(static_cast<long>(shape.n_r) * P >= Q,
              "underdetermined: n_r * pilots equations cannot resolve Q unknowns");
      require(T >= Q + P, "pilots must fit after the first Q positions");
      layout.pilots = P;
      for (int t = 0; t < T - P; ++t) layout.positions.emplace_back(0, t);
      break;
    }
    case DecoderId::kBaseline: {
      require(shape.n_t == 1, "the training baseline is a single-antenna decoder");
      const int P = pilots > 0 ? pilots : Q;
      require(P >= Q, "baseline needs at least Q pilots");
      require(T > P, "no payload left after the pilots");
      layout.pilots = P;
      for (int t = 0; t < T - P; ++t) layout.positions.emplace_back(0, t);
      break;
    }
    case DecoderId::kMimo: {
      MimoTrainingPlan plan{shape.n_t};
      plan.validate(profile);
      const int L = shape.n_t * Q;
      require(L <= std::min(T - shape.n_t, shape.n_r),
              "mimo regime needs n_t*Q <= min(T - n_t, n_r)");
      layout.pilots = 0;
      for (int t = 0; t < L; ++t) {
        for (int m = 0; m < shape.n_t; ++m) layout.positions.emplace_back(m, t);
      }
      for (int t = plan.training_end(Q); t < T; ++t) {
        for (int m = 0; m < shape.n_t; ++m) layout.positions.emplace_back(m, t);
      }
      break;
    }
  }
  return layout;
}

Matrix PayloadLayout::place(const std::vector<Complex>& payload) const {
  require(static_cast<int>(payload.size()) == dims(), "payload size does not match the layout");
  Matrix X = Matrix::Zero(n_t, T);
  for (int d = 0; d < dims(); ++d) {
    X(positions[d].first, positions[d].second) = payload[d];
  }
  if (decoder == DecoderId::kMimo) {
    X.block(0, n_t * Q, n_t, n_t) = Matrix::Identity(n_t, n_t);
  } else {
    for (int t = T - pilots; t < T; ++t) X(0, t) = 1.0;
  }
  return X;
}

Matrix PayloadLayout::assemble(const std::vector<int>& indices, const QamCodebook& codebook) const {
  std::vector<Complex> payload(indices.size());
  for (size_t d = 0; d < indices.size(); ++d) payload[d] = codebook.point(indices[d]);
  return place(payload);
}

std::vector<Complex> PayloadLayout::extract(const Matrix& X) const {
  std::vector<Complex> out(positions.size());
  for (size_t d = 0; d < positions.size(); ++d) {
    out[d] = X(positions[d].first, positions[d].second);
  }
  return out;
}

// ---- Jacobian calibration ---------------------------------------------------

ForwardMap simo_canonical_map(const CorrelationProfile& profile) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  const Matrix A = profile.whitening();
  ForwardMap map;
  map.in_dim = T - 1;
  map.out_dim = Q * (T - Q);
  map.f = [A, Q, T](const Vector& z) {
    Vector x(T);
    x.head(T - 1) = z;
    x(T - 1) = 1.0;
    const CanonicalSubspace canon = canonical_form(A * x.asDiagonal());
    Vector out(Q * (T - Q));
    Eigen::Map<Matrix>(out.data(), Q, T - Q) = canon.B.rightCols(T - Q);
    return out;
  };
  return map;
}

ForwardMap mimo_canonical_map(const CorrelationProfile& profile, const MimoTrainingPlan& plan) {
  plan.validate(profile);
  const int Q = profile.rank();
  const int T = profile.block_length();
  const int L = plan.n_t * Q;
  const PayloadLayout layout =
      make_layout(DecoderId::kMimo, profile, {plan.n_t, L});  // n_r irrelevant to the map
  const CorrelationProfile prof = profile;
  ForwardMap map;
  map.in_dim = layout.dims();
  map.out_dim = L * (T - L);
  map.f = [prof, layout, L, T](const Vector& z) {
    std::vector<Complex> payload(z.data(), z.data() + z.size());
    const Matrix X = layout.place(payload);
    const CanonicalSubspace canon = canonical_form(signal_span_matrix(prof, X));
    Vector out(static_cast<Eigen::Index>(L) * (T - L));
    Eigen::Map<Matrix>(out.data(), L, T - L) = canon.B.rightCols(T - L);
    return out;
  };
  return map;
}

Matrix numerical_jacobian(const ForwardMap& map, const Vector& z, double step) {
  require_dims(z.size() == map.in_dim, "probe point has the wrong dimension");
  Matrix J(map.out_dim, map.in_dim);
  Vector zp = z, zm = z;
  for (int j = 0; j < map.in_dim; ++j) {
    const double h = step * std::max(1.0, std::abs(z(j)));
    zp(j) = z(j) + h;
    zm(j) = z(j) - h;
    J.col(j) = (map.f(zp) - map.f(zm)) / (2.0 * h);
    zp(j) = z(j);
    zm(j) = z(j);
  }
  return J;
}

namespace {

// generic probe point: uniform in the unit box, kept away from zero like a
// zero-excluded constellation
Vector draw_probe(int dim, Rng& rng) {
  Vector z(dim);
  for (int i = 0; i < dim; ++i) {
    Complex v;
    do {
      v = Complex(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    } while (std::abs(v) < 0.05);
    z(i) = v;
  }
  return z;
}

CalibrationResult calibrate_with_factory(const std::function<ForwardMap(Rng&)>& factory,
                                         int n_probe, double epsilon, Rng& rng) {
  require(n_probe >= 1, "need at least one probe");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");

  CalibrationResult res;
  res.probes = n_probe;
  res.sigma_min.reserve(n_probe);
  for (int p = 0; p < n_probe; ++p) {
    const ForwardMap map = factory(rng);
    require_dims(map.out_dim >= map.in_dim,
                 "forward map cannot have full column rank: out_dim < in_dim");
    const Vector z = draw_probe(map.in_dim, rng);
    double smin = 0.0;
    bool ok = false;
    try {
      const Matrix J = numerical_jacobian(map, z);
      Eigen::JacobiSVD<Matrix> svd(J);
      const auto& sv = svd.singularValues();
      smin = sv(map.in_dim - 1);
      ok = smin > kRankTol * std::max(sv(0), 1e-300);
    } catch (const Error&) {
      // probe hit a singular configuration; counts as a rank failure
    }
    res.sigma_min.push_back(smin);
    if (ok) ++res.full_rank;
  }

  std::vector<double> sorted = res.sigma_min;
  std::sort(sorted.begin(), sorted.end());
  const int idx = static_cast<int>(std::floor(epsilon * (n_probe - 1)));
  res.sigma0 = sorted[static_cast<size_t>(idx)];
  return res;
}

}  // namespace

CalibrationResult calibrate_sigma0(const ForwardMap& map, int n_probe, double epsilon, Rng& rng) {
  return calibrate_with_factory([&map](Rng&) { return map; }, n_probe, epsilon, rng);
}

CalibrationResult calibrate_sigma0(const CorrelationProfile& profile, DecoderId id,
                                   SystemShape shape, int n_probe, double epsilon,
                                   std::uint64_t seed) {
  Rng rng(seed);
  switch (id) {
    case DecoderId::kSimo: {
      const ForwardMap map = simo_canonical_map(profile);
      return calibrate_sigma0(map, n_probe, epsilon, rng);
    }
    case DecoderId::kMimo: {
      const ForwardMap map = mimo_canonical_map(profile, {shape.n_t});
      return calibrate_sigma0(map, n_probe, epsilon, rng);
    }
    case DecoderId::kBaseline: {
      // the coherent receiver sees payload d scaled by the fading column at
      // its slot, so every probe carries a fresh realization
      const PayloadLayout layout = make_layout(id, profile, shape);
      auto factory = [&profile, layout](Rng& r) {
        const FadingRealization fading = sample_fading(profile, 1, layout.n_r, r);
        ForwardMap map;
        map.in_dim = layout.dims();
        map.out_dim = layout.n_r * layout.dims();
        map.f = [fading, layout](const Vector& z) {
          Vector out(static_cast<Eigen::Index>(layout.n_r) * z.size());
          for (int d = 0; d < z.size(); ++d) {
            out.segment(static_cast<Eigen::Index>(d) * layout.n_r, layout.n_r) =
                fading.coefficients[static_cast<size_t>(layout.positions[d].second)].col(0) * z(d);
          }
          return out;
        };
        return map;
      };
      return calibrate_with_factory(factory, n_probe, epsilon, rng);
    }
    case DecoderId::kSimoReduced: {
      // the observable span depends on the fading draw when n_r < Q
      const PayloadLayout layout = make_layout(id, profile, shape);
      const int L = std::min(layout.n_r, profile.rank());
      const int T = profile.block_length();
      auto factory = [&profile, layout, L, T](Rng& r) {
        const FadingRealization fading = sample_fading(profile, 1, layout.n_r, r);
        ForwardMap map;
        map.in_dim = layout.dims();
        map.out_dim = L * (T - L);
        map.f = [&profile, fading, layout, L, T](const Vector& z) {
          std::vector<Complex> payload(z.data(), z.data() + z.size());
          const Matrix Y = apply_channel(layout.place(payload), fading);
          const CanonicalSubspace canon = canonical_form(estimate_signal_subspace(Y, L));
          Vector out(static_cast<Eigen::Index>(L) * (T - L));
          Eigen::Map<Matrix>(out.data(), L, T - L) = canon.B.rightCols(T - L);
          return out;
        };
        return map;
      };
      return calibrate_with_factory(factory, n_probe, epsilon, rng);
    }
  }
  throw std::invalid_argument("unknown decoder");
}

// ---- Monte Carlo harness ----------------------------------------------------

void DofConfig::validate() const {
  require(delta > 0.0 && delta < 0.5, "delta must lie in (0, 1/2)");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(!snr_grid.empty(), "snr grid is empty");
  for (double s : snr_grid) require(s > 0.0, "snr grid values must be positive");
  require(trials_per_point >= 1, "need at least one trial per point");
  require(zero_exclusion_frac >= 0.0 && zero_exclusion_frac < 0.70710678,
          "zero exclusion fraction must stay below 1/sqrt(2)");
}

namespace {

struct DecodeOutcome {
  Matrix Xhat;  // n_t x T; empty when the decoder bailed out early
  bool ok = false;
  DecodeDiagnostics diag;
};

DecodeOutcome decode_dispatch(const PayloadLayout& layout, const CorrelationProfile& profile,
                              const Matrix& Yn) {
  DecodeOutcome out;
  switch (layout.decoder) {
    case DecoderId::kSimo: {
      SimoDecodeResult r = decode_simo(Yn, profile);
      out.ok = r.ok;
      out.diag = std::move(r.diag);
      if (r.x.size() == layout.T) out.Xhat = r.x.transpose();
      break;
    }
    case DecoderId::kSimoReduced: {
      SimoDecodeResult r = decode_simo_reduced(Yn, profile, layout.pilots);
      out.ok = r.ok;
      out.diag = std::move(r.diag);
      if (r.x.size() == layout.T) out.Xhat = r.x.transpose();
      break;
    }
    case DecoderId::kBaseline: {
      SimoDecodeResult r = baseline_training_decoder(Yn, profile, layout.pilots);
      out.ok = r.ok;
      out.diag = std::move(r.diag);
      if (r.x.size() == layout.T) out.Xhat = r.x.transpose();
      break;
    }
    case DecoderId::kMimo: {
      MimoDecodeResult r = decode_mimo(Yn, profile, {layout.n_t});
      out.ok = r.ok;
      out.diag = std::move(r.diag);
      if (r.X.size() > 0) out.Xhat = std::move(r.X);
      break;
    }
  }
  return out;
}

}  // namespace

NoiseMarginResult calibrate_noise_margin(const CorrelationProfile& profile, DecoderId id,
                                         SystemShape shape, int n_probe, double epsilon,
                                         double snr_ref, std::uint64_t seed) {
  require(n_probe >= 1, "need at least one probe");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(snr_ref > 0.0, "reference snr must be positive");
  const PayloadLayout layout = make_layout(id, profile, shape, 0);

  NoiseMarginResult res;
  res.probes = n_probe;
  res.snr_ref = snr_ref;

  std::vector<double> amps;
  amps.reserve(n_probe);
  const double root_snr = std::sqrt(snr_ref);
  for (int p = 0; p < n_probe; ++p) {
    Rng rng(Rng::derive(seed, p));
    std::vector<Complex> payload(layout.dims());
    for (auto& v : payload) {
      do {
        v = Complex(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
      } while (std::abs(v) < 0.05);
    }
    const Matrix X = layout.place(payload);
    const FadingRealization fading = sample_fading(profile, layout.n_t, layout.n_r, rng);
    const Matrix Yn = add_noise(apply_channel(X, fading), snr_ref, rng);
    const DecodeOutcome out = decode_dispatch(layout, profile, Yn);
    if (!out.ok || out.Xhat.size() == 0) {
      ++res.decode_failures;
      amps.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const std::vector<Complex> decoded = layout.extract(out.Xhat);
    double worst = 0.0;
    for (int d = 0; d < layout.dims(); ++d) {
      worst = std::max(worst, std::abs(decoded[static_cast<size_t>(d)] - payload[static_cast<size_t>(d)]));
    }
    amps.push_back(worst * root_snr);
  }

  std::sort(amps.begin(), amps.end());
  const auto idx = static_cast<size_t>(std::ceil((1.0 - epsilon) * (n_probe - 1)));
  res.amp_quantile = amps[idx];
  if (!std::isfinite(res.amp_quantile) || res.amp_quantile <= 0.0) {
    throw Error("noise margin calibration failed: decode failures dominate the quantile");
  }
  res.sigma0 = 1.0 / (2.0 * res.amp_quantile);
  return res;
}

TrialRecord run_trial(const PayloadLayout& layout, const CorrelationProfile& profile,
                      const QamCodebook& codebook, double snr, bool noiseless,
                      std::uint64_t trial_seed) {
  TrialRecord rec;
  rec.seed = trial_seed;
  rec.profile_id = profile.id();
  rec.decoder = layout.decoder;
  rec.snr = snr;
  rec.noiseless = noiseless;

  Rng rng(trial_seed);
  rec.tx.resize(layout.dims());
  for (int d = 0; d < layout.dims(); ++d) {
    rec.tx[d] = static_cast<int>(rng.integer(static_cast<std::uint64_t>(codebook.points_per_dim())));
  }
  const Matrix X = layout.assemble(rec.tx, codebook);
  const FadingRealization fading = sample_fading(profile, layout.n_t, layout.n_r, rng);
  const Matrix Y = apply_channel(X, fading);
  const Matrix Yn = noiseless ? Y : add_noise(Y, snr, rng);

  DecodeOutcome outcome = decode_dispatch(layout, profile, Yn);
  const bool ok = outcome.ok;
  rec.diag = std::move(outcome.diag);
  Matrix Xhat = std::move(outcome.Xhat);

  if (Xhat.size() == 0) {
    rec.rx.assign(layout.dims(), -1);
    rec.symbol_errors = layout.dims();
    rec.success = false;
    return rec;
  }

  const std::vector<Complex> decoded = layout.extract(Xhat);
  rec.rx.resize(layout.dims());
  rec.symbol_errors = 0;
  for (int d = 0; d < layout.dims(); ++d) {
    rec.rx[d] = codebook.nearest(decoded[static_cast<size_t>(d)]);
    if (rec.rx[d] != rec.tx[d]) ++rec.symbol_errors;
  }
  rec.success = ok && rec.symbol_errors == 0;
  return rec;
}

SweepTable run_sweep(const DofConfig& config, const CorrelationProfile& profile,
                     DecoderId id, SystemShape shape, std::uint64_t seed,
                     std::vector<TrialRecord>* records) {
  config.validate();
  const PayloadLayout layout = make_layout(id, profile, shape, 0);

  double sigma0 = config.sigma0;
  if (!(sigma0 > 0.0)) {
    // reference point for the margin probes: geometric middle of the grid
    double log_acc = 0.0;
    for (double s : config.snr_grid) log_acc += std::log(s);
    const double snr_ref = std::exp(log_acc / config.snr_grid.size());
    const NoiseMarginResult cal = calibrate_noise_margin(profile, id, shape, 1500,
                                                         config.epsilon, snr_ref,
                                                         Rng::derive(seed, 0xca11b));
    sigma0 = cal.sigma0;
  }
  require(sigma0 > 0.0, "sigma0 calibration produced a nonpositive value");

  SweepTable table;
  table.dims = layout.dims();
  table.decoder = id;
  table.sigma0 = sigma0;

  for (size_t pi = 0; pi < config.snr_grid.size(); ++pi) {
    const double snr = config.snr_grid[pi];
    const double d_min = 1.0 / (sigma0 * std::pow(snr, 0.5 - config.delta));

    SweepRow row;
    row.snr = snr;
    row.d_min = d_min;
    row.dims = layout.dims();
    // a grid needs at least 2 points per axis to carry payload; below that
    // the point is recorded as degenerate and skipped, never aborted
    if (!(d_min <= 2.0) || static_cast<int>(std::floor(2.0 / d_min)) < 2) {
      row.grid = 0;
      row.bler = 1.0;
      row.ser = 1.0;
      row.rate_bits = 0.0;
      table.rows.push_back(row);
      continue;
    }
    const QamCodebook codebook(layout.dims(), d_min, config.zero_exclusion_frac * d_min);

    long errors = 0;
    long sym_errors = 0;
    for (int i = 0; i < config.trials_per_point; ++i) {
      const std::uint64_t trial_seed = Rng::derive(seed, pi + 1, static_cast<std::uint64_t>(i));
      TrialRecord rec = run_trial(layout, profile, codebook, snr, config.noiseless, trial_seed);
      if (!rec.success) ++errors;
      sym_errors += rec.symbol_errors;
      if (records) records->push_back(std::move(rec));
    }
    row.grid = codebook.points_per_dim();
    row.rate_bits = codebook.bits();
    row.bler = static_cast<double>(errors) / config.trials_per_point;
    row.ser = static_cast<double>(sym_errors) /
              (static_cast<double>(config.trials_per_point) * layout.dims());
    table.rows.push_back(row);
  }
  return table;
}

double estimate_dof(const SweepTable& table, double error_ceiling) {
  std::vector<double> xs, ys;
  for (const SweepRow& row : table.rows) {
    if (row.grid >= 2 && row.bler <= error_ceiling) {
      xs.push_back(std::log(row.snr));
      ys.push_back(row.rate_bits * M_LN2);  // nats
    }
  }
  if (xs.size() < 3) {
    throw Error("too few qualifying sweep points for a slope estimate");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

SimoDecodeResult baseline_training_decoder(const Matrix& y_noisy,
                                           const CorrelationProfile& profile,
                                           int pilot_count, const SimoOptions& options) {
  const int Q = profile.rank();
  const int T = profile.block_length();
  const int n_r = static_cast<int>(y_noisy.rows());
  require_dims(y_noisy.cols() == T, "received block length does not match the profile");
  require(n_r >= 1, "need at least one receive antenna");
  const int P = pilot_count > 0 ? pilot_count : Q;
  require(P >= Q, "baseline needs at least Q pilots to identify the innovations");
  require(T > P, "no payload left after the pilots");

  SimoDecodeResult res;
  auto& diag = res.diag;
  const Matrix& A = profile.whitening();

  // pilot phase: y_n(t_p) = A(:,t_p)^T s_n for unit pilots
  Matrix pil(P, Q);
  for (int k = 0; k < P; ++k) pil.row(k) = A.col(T - P + k).transpose();
  Eigen::JacobiSVD<Matrix> svd(pil, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  diag.solve_cond = sv(Q - 1) > 0.0 ? sv(0) / sv(Q - 1) : std::numeric_limits<double>::infinity();
  if (!(sv(Q - 1) > kRankTol * sv(0))) {
    diag.guard_trips.push_back("pilot-rank");
    return res;
  }
  // columns are the innovation estimates per receive antenna
  const Matrix s_hat = svd.solve(y_noisy.rightCols(P).transpose());  // Q x n_r

  res.x = Vector::Zero(T);
  for (int t = T - P; t < T; ++t) res.x(t) = 1.0;

  // coherent phase: maximum-ratio detection with the rebuilt channel
  const Matrix h_hat = (A.leftCols(T - P).transpose() * s_hat).transpose();  // n_r x (T-P)
  const double gain_scale = std::max(h_hat.colwise().norm().maxCoeff(), 1e-300);
  for (int t = 0; t < T - P; ++t) {
    const Vector h = h_hat.col(t);
    const double g = h.norm();
    if (g < options.guard_tol * gain_scale) {
      diag.guard_trips.push_back("coherent-gain t=" + std::to_string(t + 1));
      continue;
    }
    res.x(t) = h.dot(y_noisy.col(t)) / (g * g);
  }

  res.ok = diag.guard_trips.empty();
  return res;
}

}  // namespace noncoh
