"""The constructive core: budgeted humps pushing every row past every target.

A run of horizon K builds x_0 = 0, x_1, ..., x_K where step k serves row
m_k = diagonal_row(k) (every row recurs infinitely often along the
diagonal walk) and adds one hump of amplitude at most beta_k:

* the decreasing budgets beta_k come from a tail-dominated sequence, so
  late humps can never undo early gains;
* gamma_k measures how much of beta_k survives all later perturbation;
* the operator index n_k is the smallest one whose norm clears k / gamma_k
  while the declared vanishing offset has decayed under beta_k / 2L.

The certificate re-derives every claimed inequality from raw family calls:
per-step budgets, image thresholds, operator-norm floors, tail bounds, and
the final growth target (image at x_K plus the declared drift is at least
k at every step).  Beyond those, it checks internal consistency of the
trace itself (schedule match and replay of recorded values), because the
analytic inequalities carry an eightfold slack by design and would shrug
off small mutations on their own.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .families import OperatorFamily
from .spaces import (
    DimensionMismatchError,
    ELL_P,
    Point,
    p_power_sum,
    quasi_norm,
    zero_point,
)

FLOAT_FLOOR = sys.float_info.min

# absolute slack granted to the final growth target when the family's
# norms come from quadrature rather than exact arithmetic
FINAL_BOUND_ATOL = 1e-6

STEP_FLAG_NAMES = (
    "structure_ok",
    "matches_schedule",
    "step_within_budget",
    "image_above_threshold",
    "norm_above_requirement",
    "tail_within_budget",
    "tail_in_unit_ball",
    "growth_target_met",
    "replay_consistent",
)


class ScheduleUnderflowError(ValueError):
    """The halving rule fell below double precision at some step."""

    def __init__(self, offending_step: int, max_safe_horizon: int, detail: str):
        self.offending_step = offending_step
        self.max_safe_horizon = max_safe_horizon
        super().__init__(
            f"schedule underflow at step {offending_step}: {detail}; "
            f"largest safe horizon for these constants is {max_safe_horizon}"
        )


class HorizonExhaustedError(RuntimeError):
    """No operator index within the search horizon met the step's demands."""

    def __init__(self, step: int, row: int, required: float, largest_seen: float, index_max: int):
        self.step = step
        self.row = row
        self.required = required
        self.largest_seen = largest_seen
        self.index_max = index_max
        super().__init__(
            f"horizon exhausted at step {step} (row {row}): need operator norm "
            f">= {required:.6g} but the largest seen up to index {index_max} is "
            f"{largest_seen:.6g}"
        )


class HumpSearchError(RuntimeError):
    """The hump search missed its image threshold within the sample budget."""

    def __init__(self, index: int, achieved: float, threshold: float):
        self.index = index
        self.achieved = achieved
        self.threshold = threshold
        super().__init__(
            f"hump search at operator index {index} reached image norm "
            f"{achieved:.6g}, below the required {threshold:.6g}, within its "
            "sample budget"
        )


def diagonal_row(k: int) -> int:
    """Row served by step k along the diagonal walk 1,1,2,1,2,3,1,2,3,4,..."""
    if k < 1:
        raise ValueError(f"steps are 1-based, got {k}")
    t = (math.isqrt(8 * k - 7) + 1) // 2
    return k - t * (t - 1) // 2


def diagonal_row_visits(row: int, count: int) -> list[int]:
    """The first ``count`` steps k with diagonal_row(k) == row, increasing."""
    if row < 1 or count < 1:
        raise ValueError(f"need row, count >= 1, got ({row}, {count})")
    return [t * (t - 1) // 2 + row for t in range(row, row + count)]


def tail_dominated_sequence(
    alpha: Callable[[int], float], cap: float, horizon: int
) -> tuple[float, ...]:
    """Positive budgets b_1..b_K with every tail below half its alpha target.

    Deterministic halving rule: b_1 = cap; afterwards b_n is half the
    smallest remaining slack alpha_m b_m / 2 - (b_{m+1} + ... + b_{n-1})
    over m < n, capped at ``cap``.  Guarantees, for every m < K,

        b_{m+1} + ... + b_K  <  alpha_m b_m / 2  <  alpha_m b_m.
    """
    if not (cap > 0.0) or not math.isfinite(cap):
        raise ValueError(f"cap must be positive and finite, got {cap}")
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    budgets: list[float] = []
    slacks: list[float] = []
    for n in range(1, horizon + 1):
        a = alpha(n)
        if not math.isfinite(a) or a <= 0.0:
            raise ValueError(f"alpha({n}) must be positive and finite, got {a}")
        b = cap if n == 1 else min(cap, min(slacks) / 2.0)
        if b < FLOAT_FLOOR:
            raise ScheduleUnderflowError(n, n - 1, "slack halving hit the float floor")
        budgets.append(b)
        slacks = [s - b for s in slacks]
        slacks.append(a * b / 2.0)
    return tuple(budgets)


@dataclass(frozen=True)
class BetaSchedule:
    """The per-step budgets, their p-th roots, and the survival margins."""

    horizon: int
    p: float
    cap: float
    rows: tuple[int, ...]
    increment_constants: tuple[float, ...]
    subadditivity_constants: tuple[float, ...]
    beta_tilde: tuple[float, ...]
    beta: tuple[float, ...]
    gamma: tuple[float, ...]


def _alpha_value(p: float, increment: float, subadditivity: float) -> float:
    return (8.0 * increment * subadditivity) ** (-p)


def _gamma_values(
    p: float,
    beta_tilde: tuple[float, ...],
    beta: tuple[float, ...],
    increments: tuple[float, ...],
    subadditivities: tuple[float, ...],
) -> tuple[float, ...]:
    # beta_i^p equals beta_tilde_i by construction, so tails are summed in
    # the budget domain where the halving guarantee lives
    gammas = []
    for i in range(len(beta)):
        tail = math.fsum(beta_tilde[i + 1 :])
        gammas.append(beta[i] / (8.0 * increments[i] * subadditivities[i]) - tail ** (1.0 / p))
    return tuple(gammas)


def build_schedule(
    p: float,
    increment_constant: Callable[[int], float],
    subadditivity_constant: Callable[[int], float],
    cap: float,
    horizon: int,
) -> BetaSchedule:
    """Budgets for a horizon-K run against rows with the given constants.

    beta_tilde is the tail-dominated sequence for alpha_k =
    (8 L_k C_k)^(-p) with L_k, C_k the constants of the row served at step
    k; beta_k is its (1/p)-th power; gamma_k subtracts the worst-case tail
    displacement from the step's guaranteed image fraction beta_k / 8 L C
    and is strictly positive whenever the tail domination holds.
    """
    if not (0.0 < p <= 1.0):
        raise ValueError(f"exponent p must lie in (0, 1], got {p}")
    if not (0.0 < cap <= 1.0):
        raise ValueError(f"cap must lie in (0, 1], got {cap}")
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    rows = tuple(diagonal_row(k) for k in range(1, horizon + 1))
    increments = tuple(float(increment_constant(m)) for m in rows)
    subadditivities = tuple(float(subadditivity_constant(m)) for m in rows)
    for m, L, C in zip(rows, increments, subadditivities):
        if L < 1.0 or C < 1.0 or not math.isfinite(L) or not math.isfinite(C):
            raise ValueError(f"row {m} constants must be finite and >= 1, got L={L}, C={C}")
    alphas = [_alpha_value(p, L, C) for L, C in zip(increments, subadditivities)]
    beta_tilde = tail_dominated_sequence(lambda k: alphas[k - 1], cap, horizon)
    beta = tuple(bt ** (1.0 / p) for bt in beta_tilde)
    for k, b in enumerate(beta, start=1):
        if b < FLOAT_FLOOR:
            raise ScheduleUnderflowError(k, k - 1, "budget root hit the float floor")
    gamma = _gamma_values(p, beta_tilde, beta, increments, subadditivities)
    for k, g in enumerate(gamma, start=1):
        if g <= 0.0:
            raise RuntimeError(
                f"internal consistency failure: gamma at step {k} is {g}, "
                "but tail domination makes it strictly positive"
            )
        if g < FLOAT_FLOOR:
            raise ScheduleUnderflowError(k, k - 1, "survival margin hit the float floor")
    for n in range(1, horizon):
        tail = math.fsum(beta_tilde[n:])
        target = alphas[n - 1] * beta_tilde[n - 1]
        if not (tail < target * (1.0 - 1e-12)):
            raise RuntimeError(
                f"internal consistency failure: tail domination missed at step {n}"
            )
    return BetaSchedule(
        horizon=horizon,
        p=p,
        cap=cap,
        rows=rows,
        increment_constants=increments,
        subadditivity_constants=subadditivities,
        beta_tilde=beta_tilde,
        beta=beta,
        gamma=gamma,
    )


def ball_image_lower_bound(
    family: OperatorFamily, index: int, row: int, x: Point, radius: float
) -> float:
    """Proven floor for the largest image norm over the radius-ball at x.

    Within the ball of the given radius around x, some point y has
    |T y| >= (radius |T| / L - offset |T|) / 2; this is the increment
    control inequality read backwards.  Clamped at zero when the offset
    has not decayed enough for the bound to say anything.
    """
    if not (0.0 < radius <= 1.0):
        raise ValueError(f"radius must lie in (0, 1], got {radius}")
    if index < family.constants.index_floor(row):
        raise ValueError(
            f"index {index} is below the family's floor "
            f"{family.constants.index_floor(row)} for row {row}"
        )
    op = family.op_norm(index, row).value
    L = family.constants.increment(row)
    offset = family.constants.vanishing_offset(index, row, x)
    return max(0.0, (radius * op / L - offset * op) / 2.0)


def select_operator_index(
    family: OperatorFamily,
    row: int,
    step: int,
    x_prev: Point,
    beta_k: float,
    gamma_k: float,
    index_prev: int,
    index_max: int,
) -> int:
    """Smallest admissible operator index for this step.

    Admissible means: above the previous step's index, at or above the
    family's declared floor for the row, vanishing offset at x_prev at most
    beta_k / 2L, and operator norm at least step / gamma_k.  Binary search
    relies on the offset being nonincreasing and the operator norm
    nondecreasing in the index, true for every shipped family; the
    certificate re-checks the selected index against both demands anyway.
    """
    offset_budget = beta_k / (2.0 * family.constants.increment(row))
    required = step / gamma_k
    lo = max(index_prev + 1, family.constants.index_floor(row))

    def admissible(n: int) -> bool:
        return (
            family.constants.vanishing_offset(n, row, x_prev) <= offset_budget
            and family.op_norm(n, row).value >= required
        )

    if lo > index_max or not admissible(index_max):
        largest = family.op_norm(index_max, row).value if lo <= index_max else 0.0
        raise HorizonExhaustedError(step, row, required, largest, index_max)
    hi = index_max
    while lo < hi:
        mid = (lo + hi) // 2
        if admissible(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass(frozen=True)
class StepOutcome:
    point: Point
    increment: Point
    image_value: float


def hump_step(
    family: OperatorFamily,
    index: int,
    row: int,
    x_prev: Point,
    beta_k: float,
    rng: Optional[np.random.Generator] = None,
) -> StepOutcome:
    """Move at most beta_k from x_prev while lifting the image norm.

    Tries the two deterministic candidates x_prev +- beta_k y along the
    family's norming direction y first; for scalar images the larger of
    |a + b| and |a - b| is at least |b|, so the threshold
    beta_k |T| / 8L is met whenever the declared efficiency is at least
    1 / 8L.  If both candidates miss (they never do for shipped
    families), falls back to seeded random rescalings of the same
    direction inside the budget ball: 4 retries of 256 samples.
    """
    op = family.op_norm(index, row).value
    threshold = beta_k * op / (8.0 * family.constants.increment(row))
    y = family.norming_direction(index, row)
    best: Optional[StepOutcome] = None
    for sigma in (1.0, -1.0):
        increment = y * (sigma * beta_k)
        candidate = x_prev + increment
        value = family.image_norm(index, row, candidate)
        if best is None or value > best.image_value:
            best = StepOutcome(candidate, increment, value)
    if best.image_value >= threshold:
        return best
    rng = np.random.default_rng(0) if rng is None else rng
    for _ in range(4):
        for _ in range(256):
            sigma = 1.0 if rng.random() < 0.5 else -1.0
            fraction = rng.random()
            increment = y * (sigma * fraction * beta_k)
            candidate = x_prev + increment
            value = family.image_norm(index, row, candidate)
            if value > best.image_value:
                best = StepOutcome(candidate, increment, value)
            if value >= threshold:
                return best
    raise HumpSearchError(index, best.image_value, threshold)


@dataclass(frozen=True)
class TraceStep:
    """One recorded step: placement, budgets, and the applied hump."""

    k: int
    row: int
    index: int
    beta: float
    gamma: float
    op_norm: float
    image_norm: float
    increment: Point


@dataclass(frozen=True)
class WitnessTrace:
    """Everything needed to replay and re-verify a run."""

    steps: tuple[TraceStep, ...]
    final_point: Point
    seed: int
    horizon: int
    cap: float
    index_max: int
    family_description: dict


@dataclass(frozen=True)
class StepCheck:
    """Re-derived flags and margins for one step of a trace."""

    k: int
    row: int
    index: int
    structure_ok: bool
    matches_schedule: bool
    step_within_budget: bool
    image_above_threshold: bool
    norm_above_requirement: bool
    tail_within_budget: bool
    tail_in_unit_ball: bool
    growth_target_met: bool
    replay_consistent: bool
    op_norm: float
    image_at_point: float
    image_at_final: float
    drift_at_final: float
    final_bound_value: float
    budget_margin: float
    image_margin: float
    norm_margin: float
    tail_margin: float
    final_margin: float

    @property
    def passed(self) -> bool:
        return all(getattr(self, name) for name in STEP_FLAG_NAMES)


@dataclass(frozen=True)
class Certificate:
    schedule_ok: bool
    steps: tuple[StepCheck, ...]
    accepted: bool


def _ge(lhs: float, rhs: float, rtol: float) -> bool:
    return lhs >= rhs - rtol * max(abs(lhs), abs(rhs))


def _le(lhs: float, rhs: float, rtol: float) -> bool:
    return lhs <= rhs + rtol * max(abs(lhs), abs(rhs))


def _matches(a: float, b: float, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def _schedule_consistent(schedule: BetaSchedule) -> bool:
    s = schedule
    if len(s.beta_tilde) != s.horizon or len(s.beta) != s.horizon or len(s.gamma) != s.horizon:
        return False
    if any(not (0.0 < bt <= s.cap) for bt in s.beta_tilde):
        return False
    if tuple(bt ** (1.0 / s.p) for bt in s.beta_tilde) != s.beta:
        return False
    recomputed = _gamma_values(
        s.p, s.beta_tilde, s.beta, s.increment_constants, s.subadditivity_constants
    )
    if recomputed != s.gamma or any(g <= 0.0 for g in s.gamma):
        return False
    for n in range(1, s.horizon):
        tail = math.fsum(s.beta_tilde[n:])
        alpha = _alpha_value(s.p, s.increment_constants[n - 1], s.subadditivity_constants[n - 1])
        if not (tail < alpha * s.beta_tilde[n - 1] * (1.0 - 1e-12)):
            return False
    return True


def verify_certificate(
    family: OperatorFamily, schedule: BetaSchedule, trace: WitnessTrace
) -> Certificate:
    """Re-derive every flag from raw family calls; never raises on failure.

    The prefix points are rebuilt by summing the recorded humps (the
    trace's cached final point and norms are used only as replay targets),
    so mutating any recorded field desynchronizes at least one flag of the
    affected step.  Exact-arithmetic families are checked with zero
    tolerance; quadrature-backed families get their declared relative
    tolerance plus a small absolute slack on the final growth target.
    """
    if len(trace.steps) != schedule.horizon:
        raise ValueError(
            f"trace has {len(trace.steps)} steps but the schedule horizon is {schedule.horizon}"
        )
    rtol = family.verification_rtol
    final_atol = FINAL_BOUND_ATOL if rtol > 0.0 else 0.0
    space = family.domain_space
    prefix = [zero_point(space)]
    for step in trace.steps:
        prefix.append(prefix[-1] + step.increment)
    x_final = prefix[-1]

    checks: list[StepCheck] = []
    index_prev = 0
    for i, step in enumerate(trace.steps):
        k = i + 1
        row = step.row
        structure_ok = (
            step.k == k
            and row == diagonal_row(k)
            and step.index > index_prev
            and step.index >= family.constants.index_floor(row)
        )
        matches_schedule = (
            step.beta == schedule.beta[i] and step.gamma == schedule.gamma[i]
        )
        L = family.constants.increment(row)
        op = family.op_norm(step.index, row).value
        x_k = prefix[i + 1]
        increment_norm = quasi_norm(space, step.increment)
        step_within_budget = _le(increment_norm, step.beta, rtol)
        image_k = family.image_norm(step.index, row, x_k)
        image_floor = step.beta * op / (8.0 * L)
        image_above_threshold = _ge(image_k, image_floor, rtol)
        norm_floor = k / step.gamma
        norm_above_requirement = _ge(op, norm_floor, rtol)
        if space.kind == ELL_P:
            tail_value = p_power_sum(space, x_final - x_k)
            tail_budget = math.fsum(b ** space.p for b in schedule.beta[i + 1 :])
            unit_value = tail_value
        else:
            tail_value = quasi_norm(space, x_final - x_k)
            tail_budget = math.fsum(schedule.beta[i + 1 :])
            unit_value = tail_value
        tail_within_budget = _le(tail_value, tail_budget, rtol)
        tail_in_unit_ball = _le(unit_value, 1.0, rtol)
        drift_final = family.constants.drift(step.index, row, x_final)
        image_final = family.image_norm(step.index, row, x_final)
        final_bound = image_final + drift_final
        growth_target_met = final_bound >= k - final_atol
        replay_consistent = _matches(op, step.op_norm, rtol) and _matches(
            image_k, step.image_norm, rtol
        )
        checks.append(
            StepCheck(
                k=k,
                row=row,
                index=step.index,
                structure_ok=structure_ok,
                matches_schedule=matches_schedule,
                step_within_budget=step_within_budget,
                image_above_threshold=image_above_threshold,
                norm_above_requirement=norm_above_requirement,
                tail_within_budget=tail_within_budget,
                tail_in_unit_ball=tail_in_unit_ball,
                growth_target_met=growth_target_met,
                replay_consistent=replay_consistent,
                op_norm=op,
                image_at_point=image_k,
                image_at_final=image_final,
                drift_at_final=drift_final,
                final_bound_value=final_bound,
                budget_margin=step.beta - increment_norm,
                image_margin=image_k - image_floor,
                norm_margin=op - norm_floor,
                tail_margin=tail_budget - tail_value,
                final_margin=final_bound - k,
            )
        )
        index_prev = step.index
    schedule_ok = _schedule_consistent(schedule)
    accepted = schedule_ok and all(c.passed for c in checks)
    return Certificate(schedule_ok=schedule_ok, steps=tuple(checks), accepted=accepted)


def run_condensation(
    family: OperatorFamily,
    horizon: int,
    cap: float = 0.5,
    index_max: int = 10**60,
    seed: int = 0,
) -> tuple[WitnessTrace, Certificate]:
    """Run the full construction and verify it.

    Builds the schedule, then for each step selects the operator index and
    applies the hump; the returned certificate re-derives every inequality.
    Deterministic for a fixed (family, horizon, cap, index_max, seed).  A
    failed step raises with the partial steps attached on the exception's
    ``partial_steps`` attribute.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    if index_max < 1:
        raise ValueError(f"index_max must be >= 1, got {index_max}")
    space = family.domain_space
    schedule = build_schedule(
        space.p,
        family.constants.increment,
        family.constants.subadditivity,
        cap,
        horizon,
    )
    if horizon >= 1:
        row_max = max(schedule.rows)
        max_row = getattr(family, "max_row", None)
        if max_row is not None and row_max > max_row:
            raise ValueError(
                f"horizon {horizon} needs rows up to {row_max} but the family "
                f"defines only {max_row}"
            )
        if space.kind == ELL_P:
            needed = family.touched_coordinate_bound(index_max, row_max)
            if needed > space.dimension:
                raise DimensionMismatchError(
                    f"the run may touch coordinate {needed} but the space holds "
                    f"{space.dimension}; raise the dimension or lower index_max"
                )
    rng = np.random.default_rng(seed)
    x = zero_point(space)
    steps: list[TraceStep] = []
    index_prev = 0
    for k in range(1, horizon + 1):
        row = schedule.rows[k - 1]
        beta_k = schedule.beta[k - 1]
        gamma_k = schedule.gamma[k - 1]
        try:
            index = select_operator_index(
                family, row, k, x, beta_k, gamma_k, index_prev, index_max
            )
            outcome = hump_step(family, index, row, x, beta_k, rng)
        except (HorizonExhaustedError, HumpSearchError) as err:
            err.partial_steps = tuple(steps)
            raise
        steps.append(
            TraceStep(
                k=k,
                row=row,
                index=index,
                beta=beta_k,
                gamma=gamma_k,
                op_norm=family.op_norm(index, row).value,
                image_norm=outcome.image_value,
                increment=outcome.increment,
            )
        )
        x = outcome.point
        index_prev = index
    trace = WitnessTrace(
        steps=tuple(steps),
        final_point=x,
        seed=seed,
        horizon=horizon,
        cap=cap,
        index_max=index_max,
        family_description=family.describe(),
    )
    return trace, verify_certificate(family, schedule, trace)
