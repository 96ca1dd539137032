"""Budgeted gliding-hump condensation with verifiable certificates.

The package builds, for operator families whose rows blow up, a single
domain point whose images are simultaneously large on every row, and
emits a replayable trace plus a certificate that re-derives every
inequality the construction relied on.
"""

from __future__ import annotations

from .config import ConfigError, RunConfig
from .families import (
    DIAGNOSTIC_FAMILY_IDS,
    FAMILY_IDS,
    FamilyConstants,
    NormingSearchError,
    OperatorFamily,
    OpNormValue,
    build_family,
    coordinate_family,
    fake_bounded_family,
    family_from_description,
    fourier_family,
    lebesgue_constant,
    nonlinear_gal_family,
    pairing_index,
)
from .glide import (
    BetaSchedule,
    Certificate,
    HorizonExhaustedError,
    HumpSearchError,
    ScheduleUnderflowError,
    StepCheck,
    TraceStep,
    WitnessTrace,
    ball_image_lower_bound,
    build_schedule,
    diagonal_row,
    diagonal_row_visits,
    hump_step,
    run_condensation,
    select_operator_index,
    tail_dominated_sequence,
    verify_certificate,
)
from .hypotheses import (
    ConditionReport,
    HypothesisReport,
    Violation,
    check_increment_control,
    check_sum_splitting,
    check_trends,
    run_all_checks,
)
from .renorm import (
    RenormReport,
    aoki_rolewicz_exponent,
    check_aoki_inequality,
    envelope_p_norm,
    induced_metric,
    renorm_report,
)
from .spaces import (
    CoordinatePoint,
    DimensionMismatchError,
    Hump,
    NonFiniteCoefficientError,
    PeriodicPoint,
    Point,
    ScalarPoint,
    SpaceDescriptor,
    ball_membership,
    ell_p_space,
    modulus_of_concavity,
    p_power_sum,
    periodic_space,
    quasi_norm,
    scalar_space,
    zero_point,
)
from .traceio import (
    TRACE_VERSION,
    certificate_to_jsonable,
    point_from_jsonable,
    point_to_jsonable,
    trace_from_jsonable,
    trace_to_jsonable,
)

__version__ = "0.1.0"

__all__ = [
    "BetaSchedule",
    "Certificate",
    "ConditionReport",
    "ConfigError",
    "CoordinatePoint",
    "DIAGNOSTIC_FAMILY_IDS",
    "DimensionMismatchError",
    "FAMILY_IDS",
    "FamilyConstants",
    "HorizonExhaustedError",
    "Hump",
    "HumpSearchError",
    "HypothesisReport",
    "NonFiniteCoefficientError",
    "NormingSearchError",
    "OpNormValue",
    "OperatorFamily",
    "PeriodicPoint",
    "Point",
    "RenormReport",
    "RunConfig",
    "ScalarPoint",
    "ScheduleUnderflowError",
    "SpaceDescriptor",
    "StepCheck",
    "TRACE_VERSION",
    "TraceStep",
    "Violation",
    "WitnessTrace",
    "aoki_rolewicz_exponent",
    "ball_image_lower_bound",
    "ball_membership",
    "build_family",
    "build_schedule",
    "certificate_to_jsonable",
    "check_aoki_inequality",
    "check_increment_control",
    "check_sum_splitting",
    "check_trends",
    "coordinate_family",
    "diagonal_row",
    "diagonal_row_visits",
    "ell_p_space",
    "envelope_p_norm",
    "fake_bounded_family",
    "family_from_description",
    "fourier_family",
    "hump_step",
    "induced_metric",
    "lebesgue_constant",
    "modulus_of_concavity",
    "nonlinear_gal_family",
    "p_power_sum",
    "pairing_index",
    "periodic_space",
    "point_from_jsonable",
    "point_to_jsonable",
    "quasi_norm",
    "renorm_report",
    "run_all_checks",
    "run_condensation",
    "scalar_space",
    "select_operator_index",
    "tail_dominated_sequence",
    "trace_from_jsonable",
    "trace_to_jsonable",
    "verify_certificate",
    "zero_point",
]
