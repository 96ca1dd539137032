from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glidinghump.renorm import (
    aoki_rolewicz_exponent,
    check_aoki_inequality,
    envelope_p_norm,
    induced_metric,
    renorm_report,
)
from glidinghump.spaces import (
    CoordinatePoint,
    ScalarPoint,
    ell_p_space,
    modulus_of_concavity,
    quasi_norm,
    scalar_space,
)

coeffs = st.floats(min_value=-1e4, max_value=1e4, allow_nan=False)
points = st.lists(st.tuples(st.integers(1, 40), coeffs), min_size=1, max_size=5).map(
    lambda pairs: CoordinatePoint(dict(pairs))
)


def test_exponent_values():
    assert aoki_rolewicz_exponent(1.0) == 1.0
    assert aoki_rolewicz_exponent(2.0) == 0.5
    # K = 2^(1/p - 1) must invert back to p
    for p in (0.25, 1.0 / 3.0, 0.5, 0.8, 1.0):
        K = 2.0 ** (1.0 / p - 1.0)
        assert aoki_rolewicz_exponent(K) == pytest.approx(p, rel=1e-12)
    with pytest.raises(ValueError):
        aoki_rolewicz_exponent(0.5)


def test_aoki_inequality_rejects_empty():
    with pytest.raises(ValueError):
        check_aoki_inequality(ell_p_space(0.5, 100), [])


@settings(max_examples=300, deadline=None)
@given(st.lists(points, min_size=1, max_size=6), st.sampled_from([0.25, 1.0 / 3.0, 0.5, 1.0]))
def test_aoki_inequality_holds(vectors, p):
    space = ell_p_space(p, 100)
    assert check_aoki_inequality(space, vectors)


def test_aoki_inequality_adversarial_copies():
    # n identical summands maximize |sum|^p / sum |x_i|^p at n^(p-1) * n = n^p / n
    space = ell_p_space(0.5, 10)
    x = CoordinatePoint.basis(3, 1.0)
    for n in (2, 4, 8, 16):
        assert check_aoki_inequality(space, [x] * n)


def test_envelope_argument_validation():
    space = ell_p_space(0.5, 100)
    x = CoordinatePoint({1: 1.0})
    with pytest.raises(ValueError):
        envelope_p_norm(space, x, max_parts=0)
    with pytest.raises(ValueError):
        envelope_p_norm(space, x, grid_steps=0)


def test_envelope_trivial_cases():
    space = ell_p_space(0.5, 100)
    x = CoordinatePoint({1: 3.0, 2: 4.0})
    base = quasi_norm(space, x)
    assert envelope_p_norm(space, x, max_parts=1) == base
    assert envelope_p_norm(scalar_space(), ScalarPoint(2.0)) == 2.0
    assert envelope_p_norm(space, CoordinatePoint.zero()) == 0.0


@settings(max_examples=150, deadline=None)
@given(points, st.sampled_from([0.5, 1.0 / 3.0]))
def test_envelope_bracket(x, p):
    space = ell_p_space(p, 100)
    base = quasi_norm(space, x)
    env = envelope_p_norm(space, x, max_parts=3, grid_steps=10)
    assert env <= base * (1 + 1e-12)
    assert env >= base / 4.0 ** (1.0 / p) - 1e-15


def test_renorm_report_fields():
    space = ell_p_space(0.5, 100)
    x = CoordinatePoint({1: 3.0, 2: 4.0})
    report = renorm_report(space, x)
    assert report.modulus == modulus_of_concavity(space)
    assert report.exponent == pytest.approx(0.5, rel=1e-12)
    assert report.quasi_norm_value == quasi_norm(space, x)
    assert report.lower <= report.envelope <= report.upper
    assert report.upper == report.quasi_norm_value


def test_induced_metric_properties():
    space = ell_p_space(0.5, 100)
    a = CoordinatePoint({1: 1.0})
    b = CoordinatePoint({2: 1.0})
    c = CoordinatePoint({1: 0.5, 2: 0.5})
    assert induced_metric(space, a, a) == 0.0
    assert induced_metric(space, a, b) == induced_metric(space, b, a)
    # d = quasi_norm(x - y)^p is a metric because the p-power sum is subadditive
    dab = induced_metric(space, a, b)
    assert dab <= induced_metric(space, a, c) + induced_metric(space, c, b) + 1e-12


@settings(max_examples=150, deadline=None)
@given(points, points, points)
def test_induced_metric_triangle(x, y, z):
    space = ell_p_space(0.5, 100)
    dxz = induced_metric(space, x, z)
    dxy = induced_metric(space, x, y)
    dyz = induced_metric(space, y, z)
    assert dxz <= (dxy + dyz) * (1 + 1e-12) + 1e-15
