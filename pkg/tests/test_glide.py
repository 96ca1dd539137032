from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glidinghump.families import coordinate_family, nonlinear_gal_family, pairing_index
from glidinghump.glide import (
    Certificate,
    HorizonExhaustedError,
    HumpSearchError,
    ScheduleUnderflowError,
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
from glidinghump.spaces import CoordinatePoint, quasi_norm


def test_diagonal_row_prefix():
    walk = [diagonal_row(k) for k in range(1, 16)]
    assert walk == [1, 1, 2, 1, 2, 3, 1, 2, 3, 4, 1, 2, 3, 4, 5]
    assert diagonal_row(6) == 3
    assert diagonal_row(10) == 4
    assert diagonal_row(7) == 1
    with pytest.raises(ValueError):
        diagonal_row(0)


def test_diagonal_row_visits():
    assert diagonal_row_visits(1, 3) == [1, 2, 4]
    assert diagonal_row_visits(2, 2) == [3, 5]
    # consistency: the listed steps really serve the row
    for row in (1, 2, 5):
        for k in diagonal_row_visits(row, 6):
            assert diagonal_row(k) == row
    with pytest.raises(ValueError):
        diagonal_row_visits(0, 1)


def test_tail_dominated_sequence_worked_example():
    got = tail_dominated_sequence(lambda n: 0.125, 1.0, 3)
    assert got == (1.0, 1.0 / 32.0, 1.0 / 1024.0)


def test_tail_dominated_sequence_validation():
    with pytest.raises(ValueError):
        tail_dominated_sequence(lambda n: 1.0, 0.0, 3)
    with pytest.raises(ValueError):
        tail_dominated_sequence(lambda n: -1.0, 1.0, 3)
    with pytest.raises(ValueError):
        tail_dominated_sequence(lambda n: 1.0, 1.0, -1)
    assert tail_dominated_sequence(lambda n: 1.0, 1.0, 0) == ()


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(min_value=1e-3, max_value=10.0), min_size=1, max_size=12),
    st.floats(min_value=1e-3, max_value=1.0),
)
def test_tail_domination_postcondition(alphas, cap):
    horizon = len(alphas)
    betas = tail_dominated_sequence(lambda n: alphas[n - 1], cap, horizon)
    assert all(0.0 < b <= cap for b in betas)
    for m in range(1, horizon):
        tail = math.fsum(betas[m:])
        assert tail < alphas[m - 1] * betas[m - 1]


def test_tail_dominated_sequence_underflow():
    with pytest.raises(ScheduleUnderflowError) as exc:
        tail_dominated_sequence(lambda n: 1e-300, 1.0, 4)
    assert exc.value.max_safe_horizon < 4
    assert exc.value.offending_step == exc.value.max_safe_horizon + 1


def test_build_schedule_single_step():
    fam = coordinate_family(0.5)
    s = build_schedule(0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, 1)
    assert s.beta_tilde == (0.5,)
    assert s.beta == (0.25,)
    assert s.gamma == (0.03125,)
    assert s.rows == (1,)


def test_build_schedule_gamma_positive_and_consistent():
    fam = nonlinear_gal_family(0.5)
    s = build_schedule(0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, 12)
    assert len(s.beta) == 12
    assert all(g > 0.0 for g in s.gamma)
    # survival margin never exceeds the undamped image fraction
    for k in range(12):
        L = s.increment_constants[k]
        C = s.subadditivity_constants[k]
        assert s.gamma[k] <= s.beta[k] / (8.0 * L * C)
        # halving design keeps at least half of it
        assert s.gamma[k] > s.beta[k] / (16.0 * L * C)


def test_build_schedule_validation():
    fam = coordinate_family(0.5)
    with pytest.raises(ValueError):
        build_schedule(0.0, fam.constants.increment, fam.constants.subadditivity, 0.5, 3)
    with pytest.raises(ValueError):
        build_schedule(0.5, fam.constants.increment, fam.constants.subadditivity, 1.5, 3)
    with pytest.raises(ValueError):
        build_schedule(0.5, lambda m: 0.5, fam.constants.subadditivity, 0.5, 3)
    empty = build_schedule(0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, 0)
    assert empty.beta == ()


def test_build_schedule_underflow_reports_safe_horizon():
    fam = coordinate_family(0.5)
    with pytest.raises(ScheduleUnderflowError) as exc:
        build_schedule(0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, 200)
    assert 0 < exc.value.max_safe_horizon < 200
    safe = exc.value.max_safe_horizon
    s = build_schedule(0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, safe)
    assert len(s.beta) == safe


def test_ball_image_lower_bound():
    fam = coordinate_family(0.5)
    # offsets vanish, L = 1: bound is radius * n / 2 exactly
    assert ball_image_lower_bound(fam, 8, 1, CoordinatePoint.zero(), 0.5) == 2.0
    gal = nonlinear_gal_family(0.5)
    # radius below the offset: the bound degenerates and clamps at zero
    assert ball_image_lower_bound(gal, 2, 1, CoordinatePoint.zero(), 0.125) == 0.0
    with pytest.raises(ValueError):
        ball_image_lower_bound(fam, 8, 1, CoordinatePoint.zero(), 0.0)
    with pytest.raises(ValueError):
        ball_image_lower_bound(fam, 8, 1, CoordinatePoint.zero(), 2.0)


def test_select_operator_index_smallest():
    fam = coordinate_family(0.5)
    x0 = CoordinatePoint.zero()
    # single-step schedule: gamma = 1/32, so the demand is op >= 32
    n = select_operator_index(fam, 1, 1, x0, 0.25, 0.03125, 0, 10**9)
    assert n == 32
    # the previous index forces strict progress
    n2 = select_operator_index(fam, 1, 1, x0, 0.25, 0.03125, 50, 10**9)
    assert n2 == 51
    # fractional threshold: smallest n > 2 with op_norm(n) >= 7.3 is 8
    n3 = select_operator_index(fam, 1, 1, x0, 0.25, 1.0 / 7.3, 2, 10**6)
    assert n3 == 8


def test_select_operator_index_exhaustion():
    fam = coordinate_family(0.5)
    with pytest.raises(HorizonExhaustedError) as exc:
        select_operator_index(fam, 1, 1, CoordinatePoint.zero(), 0.25, 0.03125, 0, 31)
    assert "horizon exhausted" in str(exc.value)
    assert exc.value.largest_seen == 31.0
    assert exc.value.required == 32.0


def test_hump_step_exact_on_fresh_coordinate():
    fam = coordinate_family(0.5)
    rng = np.random.default_rng(0)
    out = hump_step(fam, 32, 1, CoordinatePoint.zero(), 0.25, rng)
    j = pairing_index(32, 1)
    assert out.increment == CoordinatePoint.basis(j, 0.25)
    assert out.image_value == 8.0
    assert quasi_norm(fam.domain_space, out.increment) == 0.25


def test_hump_step_prefers_larger_image():
    fam = coordinate_family(0.5)
    j = pairing_index(4, 1)
    # existing mass on the target: adding with matching sign wins
    x_prev = CoordinatePoint.basis(j, -1.0)
    out = hump_step(fam, 4, 1, x_prev, 0.5, np.random.default_rng(0))
    assert out.increment == CoordinatePoint.basis(j, -0.5)
    assert out.image_value == 6.0


def test_run_condensation_vacuous_horizon():
    fam = coordinate_family(0.5)
    trace, cert = run_condensation(fam, 0, 0.5, 100, 0)
    assert trace.steps == ()
    assert cert.accepted
    assert cert.steps == ()


def test_run_condensation_coordinate_accepted():
    fam = coordinate_family(0.5)
    trace, cert = run_condensation(fam, 6, 0.5, 10**60, 0)
    assert cert.accepted
    assert [s.row for s in trace.steps] == [1, 1, 2, 1, 2, 3]
    indices = [s.index for s in trace.steps]
    assert indices == sorted(indices)
    assert len(set(indices)) == 6
    # every step's final bound clears its target with exact arithmetic
    for c in cert.steps:
        assert c.final_bound_value >= c.k
        assert c.passed


def test_run_condensation_deterministic():
    fam = nonlinear_gal_family(0.5)
    t1, c1 = run_condensation(fam, 8, 0.5, 10**60, 11)
    t2, c2 = run_condensation(fam, 8, 0.5, 10**60, 11)
    assert [s.index for s in t1.steps] == [s.index for s in t2.steps]
    assert [s.image_norm for s in t1.steps] == [s.image_norm for s in t2.steps]
    assert t1.final_point == t2.final_point
    assert c1 == c2


def test_run_condensation_exhaustion_carries_partial_steps():
    fam = coordinate_family(0.5)
    with pytest.raises(HorizonExhaustedError) as exc:
        run_condensation(fam, 2, 0.5, 40, 0)
    assert "horizon exhausted" in str(exc.value)
    assert len(exc.value.partial_steps) == 1
    assert exc.value.partial_steps[0].k == 1


def test_run_condensation_validation():
    fam = coordinate_family(0.5)
    with pytest.raises(ValueError):
        run_condensation(fam, -1, 0.5, 100, 0)
    with pytest.raises(ValueError):
        run_condensation(fam, 1, 0.5, 0, 0)
    small = coordinate_family(0.5, dimension=10)
    with pytest.raises(ValueError):
        run_condensation(small, 1, 0.5, 10**6, 0)


def test_verify_certificate_horizon_mismatch():
    fam = coordinate_family(0.5)
    trace, _ = run_condensation(fam, 3, 0.5, 10**60, 0)
    longer = build_schedule(
        0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, 4
    )
    with pytest.raises(ValueError):
        verify_certificate(fam, longer, trace)


def test_verify_certificate_idempotent():
    fam = coordinate_family(0.5)
    trace, cert = run_condensation(fam, 6, 0.5, 10**60, 0)
    schedule = build_schedule(
        0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, 6
    )
    again = verify_certificate(fam, schedule, trace)
    assert again == cert
    assert isinstance(again, Certificate)


def test_verify_certificate_tail_flags_use_power_sums():
    fam = coordinate_family(0.5)
    trace, cert = run_condensation(fam, 6, 0.5, 10**60, 0)
    # tails are compared in the power-sum domain, so equality at the last
    # step is exact: zero remaining budget, zero displacement
    last = cert.steps[-1]
    assert last.tail_within_budget
    assert last.tail_margin == 0.0


def test_gal_run_margins():
    fam = nonlinear_gal_family(0.5)
    trace, cert = run_condensation(fam, 12, 0.5, 10**60, 0)
    assert cert.accepted
    for c in cert.steps:
        assert c.final_margin > 0.0
        assert c.image_margin >= 0.0
        assert c.norm_margin >= 0.0
        assert c.budget_margin >= 0.0


def test_verify_rejects_altered_step_size():
    import dataclasses

    fam = coordinate_family(0.5)
    trace, cert = run_condensation(fam, 6, 0.5, 10**60, 0)
    assert cert.accepted
    schedule = build_schedule(
        0.5, fam.constants.increment, fam.constants.subadditivity, 0.5, 6
    )
    steps = list(trace.steps)
    steps[3] = dataclasses.replace(steps[3], beta=steps[3].beta * 0.5)
    mutated = dataclasses.replace(trace, steps=tuple(steps))
    check = verify_certificate(fam, schedule, mutated)
    assert not check.accepted
    # a shrunk step size contradicts both the schedule entry and the size
    # of the recorded increment; the inequality flags replay from the
    # untouched increment and stay true
    flagged = check.steps[3]
    assert not flagged.matches_schedule
    assert not flagged.step_within_budget
    assert flagged.image_above_threshold
    assert flagged.replay_consistent
    assert all(c.passed for i, c in enumerate(check.steps) if i != 3)
