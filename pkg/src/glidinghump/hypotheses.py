"""Randomized probes of the inequalities a family declares about itself.

Three checks, mirroring what the constructive run actually consumes:

* sum splitting: |T(x+y)| <= C (|Tx| + |T| |y| + f(index, row, x)) for
  every x and every |y| <= 1, at indices past the declared floor;
* increment control: |Ty| <= L (|T(x+y)| + |Tx| + c(index, row, x) |T|)
  for every x and every |y| <= 1, at every index;
* trends: the vanishing offsets c decay strictly (or are identically 0),
  operator norms strictly increase and clear a blow-up floor, and the
  drift stays on record at the checkpoints.

Sampled coefficients are heavy-tailed (normal times a log-uniform scale
across six decades) so both the tiny-increment and the large-cancellation
regimes get exercised; y is rescaled to a uniform radius in [0, 1).  Every
reported violation carries the serialized sample points, so it can be
replayed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .families import OperatorFamily
from .spaces import (
    CONSTANT,
    CoordinatePoint,
    ELL_P,
    Hump,
    PERIODIC,
    PeriodicPoint,
    Point,
    ScalarPoint,
    TENT,
    quasi_norm,
)
from .traceio import point_to_jsonable

REL_SLACK = 1e-12
ABS_SLACK = 1e-15

# violations stored per section in full reports; the count is always total
MAX_RECORDED_VIOLATIONS = 25


@dataclass(frozen=True)
class Violation:
    """One failed inequality with its replayable sample."""

    check: str
    sample: int
    index: int
    row: int
    lhs: float
    rhs: float
    x: dict
    y: Optional[dict]

    @property
    def deficit(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class TrendCurve:
    row: int
    checkpoints: tuple[int, ...]
    offsets: tuple[float, ...]
    op_norms: tuple[float, ...]
    drift_max: float


@dataclass(frozen=True)
class ConditionReport:
    name: str
    samples: int
    violations: tuple[Violation, ...]
    worst_margin: float
    curves: tuple[TrendCurve, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class HypothesisReport:
    family_id: str
    seed: int
    samples: int
    sections: tuple[ConditionReport, ...]

    @property
    def total_violations(self) -> int:
        return sum(len(s.violations) for s in self.sections)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.sections)


def _tolerance(family: OperatorFamily, lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs), 1.0)
    return (REL_SLACK + family.verification_rtol) * scale + ABS_SLACK


def _heavy_value(rng: np.random.Generator) -> float:
    return float(rng.standard_normal() * 10.0 ** rng.uniform(-3.0, 3.0))


def _sample_coordinate(rng: np.random.Generator, hints: list[int]) -> CoordinatePoint:
    coords: dict[int, float] = {}
    for _ in range(int(rng.integers(1, 5))):
        if hints and rng.random() < 0.5:
            index = int(hints[int(rng.integers(0, len(hints)))])
        else:
            index = int(rng.integers(1, 65))
        coords[index] = coords.get(index, 0.0) + _heavy_value(rng)
    return CoordinatePoint(coords)


def _sample_periodic(rng: np.random.Generator, centers: list[float]) -> PeriodicPoint:
    humps = []
    for _ in range(int(rng.integers(1, 4))):
        amplitude = _heavy_value(rng)
        if rng.random() < 0.2:
            humps.append(Hump(CONSTANT, amplitude))
            continue
        if centers and rng.random() < 0.5:
            center = float(centers[int(rng.integers(0, len(centers)))])
        else:
            center = float(rng.uniform(-math.pi, math.pi))
        width = float(10.0 ** rng.uniform(-2.0, 0.4))
        humps.append(Hump(TENT, amplitude, center=center, width=width))
    return PeriodicPoint(humps)


def sample_point(family: OperatorFamily, rng: np.random.Generator, index: int, row: int) -> Point:
    """A random domain point biased toward the operator's sensitive region."""
    space = family.domain_space
    if space.kind == ELL_P:
        target = getattr(family, "target_coordinate", None)
        hints = []
        if target is not None:
            hints = [target(index, row), target(index + 1, row)]
            if index > 1:
                hints.append(target(index - 1, row))
        return _sample_coordinate(rng, hints)
    if space.kind == PERIODIC:
        return _sample_periodic(rng, list(getattr(family, "points", ())))
    return ScalarPoint(_heavy_value(rng))


def sample_unit_ball(
    family: OperatorFamily, rng: np.random.Generator, index: int, row: int
) -> Point:
    """A random point rescaled to a uniform quasi-norm radius below 1."""
    y = sample_point(family, rng, index, row)
    norm = quasi_norm(family.domain_space, y)
    if norm == 0.0:
        return y
    return y * (float(rng.uniform(0.0, 1.0)) / norm)


def sum_splitting_sides(
    family: OperatorFamily, index: int, row: int, x: Point, y: Point
) -> tuple[float, float]:
    """(lhs, rhs) of the sum-splitting inequality at the given sample."""
    lhs = family.image_norm(index, row, x + y)
    op = family.op_norm(index, row).value
    rhs = family.constants.subadditivity(row) * (
        family.image_norm(index, row, x)
        + op * quasi_norm(family.domain_space, y)
        + family.constants.drift(index, row, x)
    )
    return lhs, rhs


def increment_control_sides(
    family: OperatorFamily, index: int, row: int, x: Point, y: Point
) -> tuple[float, float]:
    """(lhs, rhs) of the increment-control inequality at the given sample."""
    lhs = family.image_norm(index, row, y)
    op = family.op_norm(index, row).value
    rhs = family.constants.increment(row) * (
        family.image_norm(index, row, x + y)
        + family.image_norm(index, row, x)
        + family.constants.vanishing_offset(index, row, x) * op
    )
    return lhs, rhs


def _row_limit(family: OperatorFamily, row_max: int) -> int:
    declared = getattr(family, "max_row", None)
    return min(row_max, declared) if declared is not None else row_max


def check_sum_splitting(
    family: OperatorFamily,
    samples: int = 10000,
    seed: int = 0,
    index_max: int = 64,
    row_max: int = 8,
) -> ConditionReport:
    if samples < 1:
        raise ValueError(f"need samples >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    row_hi = _row_limit(family, row_max)
    violations: list[Violation] = []
    worst = math.inf
    total = 0
    for i in range(samples):
        row = int(rng.integers(1, row_hi + 1))
        lo = max(1, family.constants.index_floor(row))
        index = int(rng.integers(lo, index_max + 1)) if lo <= index_max else lo
        x = sample_point(family, rng, index, row)
        y = sample_unit_ball(family, rng, index, row)
        lhs, rhs = sum_splitting_sides(family, index, row, x, y)
        worst = min(worst, rhs - lhs)
        total += 1
        if lhs > rhs + _tolerance(family, lhs, rhs):
            violations.append(
                Violation(
                    "sum_splitting", i, index, row, lhs, rhs,
                    point_to_jsonable(x), point_to_jsonable(y),
                )
            )
    return ConditionReport("sum_splitting", total, tuple(violations), worst)


def check_increment_control(
    family: OperatorFamily,
    samples: int = 10000,
    seed: int = 0,
    index_max: int = 64,
    row_max: int = 8,
) -> ConditionReport:
    if samples < 1:
        raise ValueError(f"need samples >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    row_hi = _row_limit(family, row_max)
    violations: list[Violation] = []
    worst = math.inf
    total = 0
    for i in range(samples):
        row = int(rng.integers(1, row_hi + 1))
        index = int(rng.integers(1, index_max + 1))
        x = sample_point(family, rng, index, row)
        y = sample_unit_ball(family, rng, index, row)
        lhs, rhs = increment_control_sides(family, index, row, x, y)
        worst = min(worst, rhs - lhs)
        total += 1
        if lhs > rhs + _tolerance(family, lhs, rhs):
            violations.append(
                Violation(
                    "increment_control", i, index, row, lhs, rhs,
                    point_to_jsonable(x), point_to_jsonable(y),
                )
            )
    return ConditionReport("increment_control", total, tuple(violations), worst)


def check_trends(
    family: OperatorFamily,
    samples: int = 32,
    seed: int = 0,
    index_max: int = 64,
    row_max: int = 4,
    blowup_floor: float = 1.5,
) -> ConditionReport:
    """Decay, blow-up, and drift bookkeeping at three index checkpoints."""
    if samples < 1:
        raise ValueError(f"need samples >= 1, got {samples}")
    if index_max < 16:
        raise ValueError(f"need index_max >= 16 for distinct checkpoints, got {index_max}")
    checkpoints = (index_max // 4, index_max // 2, index_max)
    rng = np.random.default_rng(seed)
    row_hi = _row_limit(family, row_max)
    violations: list[Violation] = []
    curves: list[TrendCurve] = []
    worst = math.inf
    total = 0
    for i in range(samples):
        for row in range(1, row_hi + 1):
            x = sample_point(family, rng, checkpoints[-1], row)
            offsets = tuple(
                family.constants.vanishing_offset(n, row, x) for n in checkpoints
            )
            op_norms = tuple(family.op_norm(n, row).value for n in checkpoints)
            drift_max = max(
                family.constants.drift(n, row, x) for n in checkpoints
            )
            if i == 0:
                curves.append(TrendCurve(row, checkpoints, offsets, op_norms, drift_max))
            total += 1
            witness = point_to_jsonable(x)
            if any(v != 0.0 for v in offsets):
                for a, b in zip(offsets, offsets[1:]):
                    worst = min(worst, a - b)
                    if not (b < a):
                        violations.append(
                            Violation("offset_decay", i, checkpoints[-1], row, b, a, witness, None)
                        )
                        break
            for a, b in zip(op_norms, op_norms[1:]):
                worst = min(worst, b - a)
                if not (b > a):
                    violations.append(
                        Violation("norm_blowup", i, checkpoints[-1], row, a, b, witness, None)
                    )
                    break
            else:
                worst = min(worst, op_norms[-1] - blowup_floor)
                if not (op_norms[-1] >= blowup_floor):
                    violations.append(
                        Violation(
                            "norm_blowup", i, checkpoints[-1], row,
                            op_norms[-1], blowup_floor, witness, None,
                        )
                    )
    return ConditionReport("trends", total, tuple(violations), worst, tuple(curves))


def run_all_checks(
    family: OperatorFamily,
    samples: int = 10000,
    seed: int = 0,
    trend_samples: int = 32,
    index_max: int = 64,
    row_max: int = 8,
    blowup_floor: float = 1.5,
) -> HypothesisReport:
    """The full battery with derived per-section seeds."""
    sections = (
        check_sum_splitting(family, samples, seed, index_max, row_max),
        check_increment_control(family, samples, seed + 1, index_max, row_max),
        check_trends(family, trend_samples, seed + 2, index_max, min(row_max, 4), blowup_floor),
    )
    return HypothesisReport(family.family_id, seed, samples, sections)


def report_to_jsonable(report: HypothesisReport) -> dict:
    return {
        "family": report.family_id,
        "seed": report.seed,
        "samples": report.samples,
        "passed": report.passed,
        "total_violations": report.total_violations,
        "sections": [
            {
                "name": s.name,
                "samples": s.samples,
                "passed": s.passed,
                "worst_margin": s.worst_margin,
                "violation_count": len(s.violations),
                "violations": [
                    {
                        "check": v.check,
                        "sample": v.sample,
                        "index": v.index,
                        "row": v.row,
                        "lhs": v.lhs,
                        "rhs": v.rhs,
                        "x": v.x,
                        "y": v.y,
                    }
                    for v in s.violations[:MAX_RECORDED_VIOLATIONS]
                ],
                "curves": [
                    {
                        "row": c.row,
                        "checkpoints": list(c.checkpoints),
                        "offsets": list(c.offsets),
                        "op_norms": list(c.op_norms),
                        "drift_max": c.drift_max,
                    }
                    for c in s.curves
                ],
            }
            for s in report.sections
        ],
    }


REPORT_HEADER = ("check", "samples", "violations", "worst_margin")


def report_table(report: HypothesisReport) -> list[tuple]:
    return [
        (s.name, s.samples, len(s.violations), s.worst_margin)
        for s in report.sections
    ]
