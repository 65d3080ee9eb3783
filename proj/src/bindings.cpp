// Python bindings for the main operations.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "noncoh/channel.hpp"
#include "noncoh/dof.hpp"
#include "noncoh/experiment.hpp"
#include "noncoh/mimo.hpp"
#include "noncoh/simo.hpp"
#include "noncoh/subspace.hpp"

namespace py = pybind11;
using namespace noncoh;

namespace {

FadingRealization sample_fading_seeded(const CorrelationProfile& profile, int n_t, int n_r,
                                       std::uint64_t seed) {
  Rng rng(seed);
  return sample_fading(profile, n_t, n_r, rng);
}

Matrix add_noise_seeded(const Matrix& Y, double snr, std::uint64_t seed) {
  Rng rng(seed);
  return add_noise(Y, snr, rng);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonlinear subspace decoding for correlatively changing fading channels";

  // translators run newest-first, so the base class goes in first
  py::register_exception<Error>(m, "NoncohError");
  py::register_exception<RankDeficientError>(m, "RankDeficientError");
  py::register_exception<SingularPivotError>(m, "SingularPivotError");
  py::register_exception<DimensionError>(m, "DimensionError");

  py::class_<CorrelationProfile>(m, "CorrelationProfile")
      .def(py::init<Matrix>(), py::arg("A"))
      .def_property_readonly("A", &CorrelationProfile::whitening)
      .def_property_readonly("Q", &CorrelationProfile::rank)
      .def_property_readonly("T", &CorrelationProfile::block_length)
      .def("covariance", &CorrelationProfile::covariance)
      .def("id", &CorrelationProfile::id);

  py::class_<FadingRealization>(m, "FadingRealization")
      .def_readonly("innovations", &FadingRealization::innovations)
      .def_readonly("coefficients", &FadingRealization::coefficients)
      .def_property_readonly("n_r", &FadingRealization::n_r)
      .def_property_readonly("n_t", &FadingRealization::n_t);

  m.def("sample_fading", &sample_fading_seeded, py::arg("profile"), py::arg("n_t"),
        py::arg("n_r"), py::arg("seed"));
  m.def("apply_channel",
        py::overload_cast<const Matrix&, const FadingRealization&>(&apply_channel),
        py::arg("X"), py::arg("fading"));
  m.def("add_noise", &add_noise_seeded, py::arg("Y"), py::arg("snr"), py::arg("seed"));

  py::enum_<PivotPolicy>(m, "PivotPolicy")
      .value("FIXED_LEADING", PivotPolicy::kFixedLeading)
      .value("GREEDY_CONDITIONED", PivotPolicy::kGreedyConditioned);

  py::class_<CanonicalSubspace>(m, "CanonicalSubspace")
      .def_readonly("B", &CanonicalSubspace::B)
      .def_readonly("pivot_cols", &CanonicalSubspace::pivot_cols)
      .def_property_readonly("dim", &CanonicalSubspace::dim)
      .def_property_readonly("ambient", &CanonicalSubspace::ambient);

  m.def("canonical_form", &canonical_form, py::arg("R"),
        py::arg("policy") = PivotPolicy::kFixedLeading);
  m.def("estimate_signal_subspace", &estimate_signal_subspace, py::arg("Y_noisy"), py::arg("L"));
  m.def("subspace_distance", &subspace_distance, py::arg("U"), py::arg("V"));

  py::class_<SideInformation>(m, "SideInformation")
      .def_readonly("E", &SideInformation::E)
      .def("column", &SideInformation::column, py::arg("t"));
  m.def("compute_side_information", &compute_side_information, py::arg("profile"));

  py::class_<ConditionFailure>(m, "ConditionFailure")
      .def_readonly("condition", &ConditionFailure::condition)
      .def_readonly("q", &ConditionFailure::q)
      .def_readonly("t", &ConditionFailure::t)
      .def_readonly("indices", &ConditionFailure::indices)
      .def_readonly("magnitude", &ConditionFailure::magnitude)
      .def_readonly("det_ratio", &ConditionFailure::det_ratio);

  py::class_<RecoveryReport>(m, "RecoveryReport")
      .def_readonly("passed", &RecoveryReport::passed)
      .def_readonly("failures", &RecoveryReport::failures)
      .def_readonly("notes", &RecoveryReport::notes);

  m.def("check_recovery_simo", &check_recovery_simo, py::arg("profile"));
  m.def("check_recovery_mimo", &check_recovery_mimo, py::arg("profile"), py::arg("n_t"));

  py::class_<DecodeDiagnostics>(m, "DecodeDiagnostics")
      .def_readonly("guard_trips", &DecodeDiagnostics::guard_trips)
      .def_readonly("subspace_cond", &DecodeDiagnostics::subspace_cond)
      .def_readonly("pivot_cond", &DecodeDiagnostics::pivot_cond)
      .def_readonly("solve_cond", &DecodeDiagnostics::solve_cond)
      .def_readonly("residual", &DecodeDiagnostics::residual);

  py::class_<SimoDecodeResult>(m, "SimoDecodeResult")
      .def_readonly("x", &SimoDecodeResult::x)
      .def_readonly("ok", &SimoDecodeResult::ok)
      .def_readonly("diag", &SimoDecodeResult::diag);

  py::class_<SimoOptions>(m, "SimoOptions")
      .def(py::init<>())
      .def_readwrite("ls_chaining", &SimoOptions::ls_chaining)
      .def_readwrite("guard_tol", &SimoOptions::guard_tol)
      .def_readwrite("consistency_tol", &SimoOptions::consistency_tol);

  m.def("decode_simo", &decode_simo, py::arg("Y_noisy"), py::arg("profile"),
        py::arg("options") = SimoOptions{});
  m.def("decode_simo_reduced", &decode_simo_reduced, py::arg("Y_noisy"), py::arg("profile"),
        py::arg("n_pilots") = 0, py::arg("options") = SimoOptions{});
  m.def("baseline_training_decoder", &baseline_training_decoder, py::arg("Y_noisy"),
        py::arg("profile"), py::arg("pilot_count") = 0, py::arg("options") = SimoOptions{});

  py::class_<MimoTrainingPlan>(m, "MimoTrainingPlan")
      .def(py::init([](int n_t) { return MimoTrainingPlan{n_t}; }), py::arg("n_t"))
      .def_readonly("n_t", &MimoTrainingPlan::n_t)
      .def("training_start", &MimoTrainingPlan::training_start, py::arg("Q"))
      .def("training_end", &MimoTrainingPlan::training_end, py::arg("Q"));

  py::class_<MimoOptions>(m, "MimoOptions")
      .def(py::init<>())
      .def_readwrite("ls_linear_phase", &MimoOptions::ls_linear_phase)
      .def_readwrite("guard_tol", &MimoOptions::guard_tol);

  py::class_<MimoDecodeResult>(m, "MimoDecodeResult")
      .def_readonly("X", &MimoDecodeResult::X)
      .def_readonly("ok", &MimoDecodeResult::ok)
      .def_readonly("diag", &MimoDecodeResult::diag);

  m.def("signal_span_matrix", &signal_span_matrix, py::arg("profile"), py::arg("X"));
  m.def("decode_mimo", &decode_mimo, py::arg("Y_noisy"), py::arg("profile"), py::arg("plan"),
        py::arg("options") = MimoOptions{});

  py::enum_<DecoderId>(m, "DecoderId")
      .value("SIMO", DecoderId::kSimo)
      .value("SIMO_REDUCED", DecoderId::kSimoReduced)
      .value("MIMO", DecoderId::kMimo)
      .value("BASELINE", DecoderId::kBaseline);

  py::class_<SystemShape>(m, "SystemShape")
      .def(py::init([](int n_t, int n_r) { return SystemShape{n_t, n_r}; }),
           py::arg("n_t") = 1, py::arg("n_r") = 1)
      .def_readwrite("n_t", &SystemShape::n_t)
      .def_readwrite("n_r", &SystemShape::n_r);

  py::class_<QamCodebook>(m, "QamCodebook")
      .def(py::init<int, double, double>(), py::arg("dims"), py::arg("d_min"),
           py::arg("zero_exclusion"))
      .def_property_readonly("dims", &QamCodebook::dims)
      .def("points_per_dim", &QamCodebook::points_per_dim)
      .def("point", &QamCodebook::point, py::arg("index"))
      .def("nearest", &QamCodebook::nearest, py::arg("z"))
      .def("bits", &QamCodebook::bits)
      .def("min_distance", &QamCodebook::min_distance);

  py::class_<CalibrationResult>(m, "CalibrationResult")
      .def_readonly("sigma0", &CalibrationResult::sigma0)
      .def_readonly("probes", &CalibrationResult::probes)
      .def_readonly("full_rank", &CalibrationResult::full_rank)
      .def_readonly("sigma_min", &CalibrationResult::sigma_min)
      .def("rank_rate", &CalibrationResult::rank_rate)
      .def("premise_ok", &CalibrationResult::premise_ok, py::arg("epsilon"));

  m.def(
      "calibrate_sigma0",
      [](const CorrelationProfile& profile, DecoderId id, SystemShape shape, int n_probe,
         double epsilon, std::uint64_t seed) {
        return calibrate_sigma0(profile, id, shape, n_probe, epsilon, seed);
      },
      py::arg("profile"), py::arg("decoder"), py::arg("shape"), py::arg("n_probe"),
      py::arg("epsilon"), py::arg("seed"));

  py::class_<NoiseMarginResult>(m, "NoiseMarginResult")
      .def_readonly("sigma0", &NoiseMarginResult::sigma0)
      .def_readonly("amp_quantile", &NoiseMarginResult::amp_quantile)
      .def_readonly("probes", &NoiseMarginResult::probes)
      .def_readonly("decode_failures", &NoiseMarginResult::decode_failures)
      .def_readonly("snr_ref", &NoiseMarginResult::snr_ref);

  m.def("calibrate_noise_margin", &calibrate_noise_margin, py::arg("profile"), py::arg("decoder"),
        py::arg("shape"), py::arg("n_probe"), py::arg("epsilon"), py::arg("snr_ref"),
        py::arg("seed"));

  py::class_<DofConfig>(m, "DofConfig")
      .def(py::init<>())
      .def_readwrite("delta", &DofConfig::delta)
      .def_readwrite("sigma0", &DofConfig::sigma0)
      .def_readwrite("epsilon", &DofConfig::epsilon)
      .def_readwrite("snr_grid", &DofConfig::snr_grid)
      .def_readwrite("trials_per_point", &DofConfig::trials_per_point)
      .def_readwrite("noiseless", &DofConfig::noiseless)
      .def_readwrite("zero_exclusion_frac", &DofConfig::zero_exclusion_frac);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("snr", &SweepRow::snr)
      .def_readonly("d_min", &SweepRow::d_min)
      .def_readonly("grid", &SweepRow::grid)
      .def_readonly("bler", &SweepRow::bler)
      .def_readonly("rate_bits", &SweepRow::rate_bits)
      .def_readonly("dims", &SweepRow::dims)
      .def_readonly("ser", &SweepRow::ser);

  py::class_<SweepTable>(m, "SweepTable")
      .def_readonly("rows", &SweepTable::rows)
      .def_readonly("dims", &SweepTable::dims)
      .def_readonly("sigma0", &SweepTable::sigma0);

  m.def(
      "run_sweep",
      [](const DofConfig& config, const CorrelationProfile& profile, DecoderId id,
         SystemShape shape, std::uint64_t seed) {
        return run_sweep(config, profile, id, shape, seed);
      },
      py::arg("config"), py::arg("profile"), py::arg("decoder"), py::arg("shape"),
      py::arg("seed"));
  m.def("estimate_dof", &estimate_dof, py::arg("table"), py::arg("error_ceiling") = 0.05);

  m.def("sweep_csv", [](const SweepTable& table) {
    std::ostringstream os;
    write_sweep_csv(os, table);
    return os.str();
  });
}
