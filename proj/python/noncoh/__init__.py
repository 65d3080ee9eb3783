"""Nonlinear subspace decoding for correlatively changing fading channels."""

from noncoh._core import (  # noqa: F401
    CalibrationResult,
    CanonicalSubspace,
    ConditionFailure,
    CorrelationProfile,
    DecodeDiagnostics,
    DecoderId,
    DimensionError,
    DofConfig,
    FadingRealization,
    MimoDecodeResult,
    MimoOptions,
    MimoTrainingPlan,
    NoiseMarginResult,
    NoncohError,
    PivotPolicy,
    QamCodebook,
    RankDeficientError,
    RecoveryReport,
    SideInformation,
    SimoDecodeResult,
    SimoOptions,
    SingularPivotError,
    SweepRow,
    SweepTable,
    SystemShape,
    add_noise,
    apply_channel,
    baseline_training_decoder,
    calibrate_noise_margin,
    calibrate_sigma0,
    canonical_form,
    check_recovery_mimo,
    check_recovery_simo,
    compute_side_information,
    decode_mimo,
    decode_simo,
    decode_simo_reduced,
    estimate_dof,
    estimate_signal_subspace,
    run_sweep,
    sample_fading,
    signal_span_matrix,
    subspace_distance,
    sweep_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
