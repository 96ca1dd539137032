"""Operator families whose rows blow up, with declared inequality constants.

A family is a double sequence of bounded homogeneous maps T[index, row] from
a domain space into scalars.  ``row`` labels the sequence being condensed
(every row's operator norms are unbounded in ``index``); the constructive
run interleaves rows and pushes a single domain point to large image norms
on all of them simultaneously.

Each family declares the constants of two sampled inequalities, for every
x and every y with |y| <= 1:

* sum splitting, valid for index >= index_floor(row):
      |T(x+y)| <= subadditivity(row) * (|Tx| + |T| |y| + drift(index,row,x))
* increment control, valid everywhere:
      |Ty| <= increment(row) * (|T(x+y)| + |Tx| + vanishing_offset(index,row,x) |T|)

with drift bounded in the index and vanishing_offset decaying to 0.  The
hypotheses module probes these declarations on random samples; the glide
module consumes them wholesale.

Shipped families:

* ``coordinate``: T[n, m](x) = n * x_j with j = pairing_index(n, m), on
  ell^p.  Linear, operator norm exactly n, all offsets zero.
* ``nonlinear-gal``: T[n, m](x) = n|x_j| + |x|/n on ell^p.  Nonlinear with
  genuinely nonzero drift and offset declarations.
* ``fourier``: T[n, m](f) = n-th partial Fourier sum of f at the row's
  target angle, on continuous periodic functions.  Operator norm is the
  Lebesgue constant, computed by composite quadrature.
* ``fake-bounded``: a deliberately broken diagnostic family with constant
  operator norms; the hypothesis checker must reject it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, ClassVar, NamedTuple, Optional, Protocol

import numpy as np

from .spaces import (
    CONSTANT,
    DIRICHLET_SIGN,
    CoordinatePoint,
    Hump,
    PeriodicPoint,
    Point,
    SpaceDescriptor,
    TWO_PI,
    dirichlet_kernel,
    dirichlet_zeros,
    ell_p_space,
    periodic_space,
    quasi_norm,
    wrap_angle,
)

FAMILY_IDS = ("coordinate", "fourier", "nonlinear-gal")
DIAGNOSTIC_FAMILY_IDS = FAMILY_IDS + ("fake-bounded",)

# indices above this cannot be represented in a double, so operator norms
# would silently saturate; refuse instead
MAX_OPERATOR_INDEX = 10**300

# coordinate truncation used when the caller does not plan one; sparse
# points never allocate it
DEFAULT_TRUNCATION = 10**200


class NormingSearchError(RuntimeError):
    """No direction reaching the declared efficiency was found."""


class OpNormValue(NamedTuple):
    """A lower bound for an operator norm, flagged exact when it is the norm."""

    value: float
    exact: bool


@dataclass(frozen=True)
class FamilyConstants:
    """Declared constants of the two sampled inequalities.

    ``subadditivity(row)`` and ``increment(row)`` are the multiplicative
    constants (both >= 1 for shipped families); ``index_floor(row)`` is the
    least operator index at which the sum-splitting declaration starts;
    ``vanishing_offset(index, row, x)`` must decay to 0 in the index and
    ``drift(index, row, x)`` must stay bounded.
    """

    subadditivity: Callable[[int], float]
    increment: Callable[[int], float]
    index_floor: Callable[[int], int]
    vanishing_offset: Callable[[int, int, Point], float]
    drift: Callable[[int, int, Point], float]


class OperatorFamily(Protocol):
    family_id: str
    verification_rtol: float
    domain_space: SpaceDescriptor
    constants: FamilyConstants
    eta: float

    def op_norm(self, index: int, row: int) -> OpNormValue: ...

    def image_norm(self, index: int, row: int, x: Point) -> float: ...

    def norming_direction(self, index: int, row: int) -> Point: ...

    def touched_coordinate_bound(self, index_max: int, row_max: int) -> int: ...

    def describe(self) -> dict: ...


def pairing_index(index: int, row: int) -> int:
    """Bijective pairing of (index, row) onto 1-based coordinates.

    Walks the anti-diagonals: (1,1) -> 1, (1,2) -> 2, (2,1) -> 3, ...
    Exact integer arithmetic; indices routinely exceed 2^53.
    """
    if index < 1 or row < 1:
        raise ValueError(f"pairing needs index, row >= 1, got ({index}, {row})")
    s = index + row
    return (s - 2) * (s - 1) // 2 + index


def _validate_index_row(index: int, row: int) -> None:
    if index < 1 or row < 1:
        raise ValueError(f"operator position needs index, row >= 1, got ({index}, {row})")
    if index > MAX_OPERATOR_INDEX:
        raise ValueError(f"operator index {index} exceeds the double-precision range")


def _zero_offset(index: int, row: int, x: Point) -> float:
    return 0.0


def _one(row: int) -> float:
    return 1.0


def _floor_one(row: int) -> int:
    return 1


@dataclass(frozen=True)
class CoordinateFamily:
    """T[n, m](x) = n * x_j with j = pairing_index(n, m), on ell^p.

    The simplest blowing-up family: linear, scalar images, operator norm
    exactly n (attained on the j-th basis vector), every declared offset
    identically zero.
    """

    family_id: ClassVar[str] = "coordinate"
    verification_rtol: ClassVar[float] = 0.0
    max_row: ClassVar[Optional[int]] = None

    domain_space: SpaceDescriptor
    constants: FamilyConstants
    eta: float

    def target_coordinate(self, index: int, row: int) -> int:
        return pairing_index(index, row)

    def op_norm(self, index: int, row: int) -> OpNormValue:
        _validate_index_row(index, row)
        return OpNormValue(float(index), True)

    def image_norm(self, index: int, row: int, x: CoordinatePoint) -> float:
        _validate_index_row(index, row)
        return float(index) * abs(x.get(pairing_index(index, row)))

    def norming_direction(self, index: int, row: int) -> CoordinatePoint:
        _validate_index_row(index, row)
        return CoordinatePoint.basis(pairing_index(index, row))

    def touched_coordinate_bound(self, index_max: int, row_max: int) -> int:
        return pairing_index(index_max, row_max) + 1

    def describe(self) -> dict:
        return {
            "family": self.family_id,
            "p": self.domain_space.p,
            "dimension": self.domain_space.dimension,
            "eta": self.eta,
        }


def coordinate_family(
    p: float, eta_default: float = 1.0, dimension: Optional[int] = None
) -> CoordinateFamily:
    if not (0.0 < eta_default <= 1.0):
        raise ValueError(f"eta must lie in (0, 1], got {eta_default}")
    space = ell_p_space(p, DEFAULT_TRUNCATION if dimension is None else dimension)
    constants = FamilyConstants(
        subadditivity=_one,
        increment=_one,
        index_floor=_floor_one,
        vanishing_offset=_zero_offset,
        drift=_zero_offset,
    )
    return CoordinateFamily(domain_space=space, constants=constants, eta=eta_default)


def _inverse_square_offset(index: int, row: int, x: Point) -> float:
    inv = 1.0 / float(index)
    return inv * inv


@dataclass(frozen=True)
class NonlinearGalFamily:
    """T[n, m](x) = n |x_j| + |x| / n with j = pairing_index(n, m), on ell^p.

    Homogeneous but not subadditive: the second term mixes the whole point
    into every image, so the sum-splitting constant is the space's modulus
    of concavity and both declared offset functions are genuinely nonzero.
    Operator norm is exactly n + 1/n, attained on the j-th basis vector.
    """

    family_id: ClassVar[str] = "nonlinear-gal"
    verification_rtol: ClassVar[float] = 0.0
    max_row: ClassVar[Optional[int]] = None

    domain_space: SpaceDescriptor
    constants: FamilyConstants
    eta: float = 0.5

    def target_coordinate(self, index: int, row: int) -> int:
        return pairing_index(index, row)

    def op_norm(self, index: int, row: int) -> OpNormValue:
        _validate_index_row(index, row)
        return OpNormValue(float(index) + 1.0 / float(index), True)

    def image_norm(self, index: int, row: int, x: CoordinatePoint) -> float:
        _validate_index_row(index, row)
        j = pairing_index(index, row)
        return float(index) * abs(x.get(j)) + quasi_norm(self.domain_space, x) / float(index)

    def norming_direction(self, index: int, row: int) -> CoordinatePoint:
        # the basis vector attains the operator norm, far above the
        # conservative declared efficiency of 1/2
        _validate_index_row(index, row)
        return CoordinatePoint.basis(pairing_index(index, row))

    def touched_coordinate_bound(self, index_max: int, row_max: int) -> int:
        return pairing_index(index_max, row_max) + 1

    def describe(self) -> dict:
        return {
            "family": self.family_id,
            "p": self.domain_space.p,
            "dimension": self.domain_space.dimension,
            "eta": self.eta,
        }


def nonlinear_gal_family(p: float, dimension: Optional[int] = None) -> NonlinearGalFamily:
    if not (0.0 < p < 1.0):
        raise ValueError(f"this family needs p in (0, 1), got {p}")
    space = ell_p_space(p, DEFAULT_TRUNCATION if dimension is None else dimension)
    modulus = 2.0 ** (1.0 / p - 1.0)

    def drift(index: int, row: int, x: Point) -> float:
        # bounded in the index for fixed x; decays like 1/index
        return modulus / float(index) * quasi_norm(space, x)

    constants = FamilyConstants(
        subadditivity=lambda row: modulus,
        increment=_one,
        index_floor=_floor_one,
        vanishing_offset=_inverse_square_offset,
        drift=drift,
    )
    return NonlinearGalFamily(domain_space=space, constants=constants)


@lru_cache(maxsize=None)
def _gauss_rule(count: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(count)
    return nodes, weights


def _composite_quadrature(edges: np.ndarray, per_segment: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss nodes and weights for every segment between consecutive edges."""
    xi, wi = _gauss_rule(per_segment)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * xi[None, :]).ravel()
    weights = (half * wi[None, :]).ravel()
    return nodes, weights


def _require_quadrature_order(quadrature_order: int, order: int) -> None:
    if quadrature_order < 2 * (order + 1):
        raise ValueError(
            f"quadrature_order {quadrature_order} too small for kernel order {order}; "
            f"need at least {2 * (order + 1)}"
        )


@lru_cache(maxsize=None)
def lebesgue_constant(order: int, quadrature_order: int) -> float:
    """Mean of |D_n| over one period, D_n the order-n Dirichlet kernel.

    This is the operator norm of the n-th partial-sum functional at any
    fixed angle.  Computed as (1/pi) * integral over [0, pi] (the kernel is
    even), with the interval cut at the kernel's n interior zeros and
    Gauss-Legendre applied per segment.  Order 0 returns exactly 1.
    """
    if order < 0:
        raise ValueError(f"kernel order must be >= 0, got {order}")
    _require_quadrature_order(quadrature_order, order)
    if order == 0:
        return 1.0
    zeros = TWO_PI * np.arange(1, order + 1) / (2 * order + 1)
    edges = np.concatenate([[0.0], zeros, [math.pi]])
    per_segment = min(64, max(2, quadrature_order // (order + 1)))
    nodes, weights = _composite_quadrature(edges, per_segment)
    values = np.abs(dirichlet_kernel(nodes, order))
    return float(np.dot(values, weights) / math.pi)


@dataclass(frozen=True)
class FourierFamily:
    """Partial Fourier sums evaluated at fixed target angles.

    T[n, m](f) = the n-th partial sum of f at angle points[m-1], realized
    as the kernel convolution (1/2pi) integral of f(s) D_n(t - s) ds and
    computed by composite Gauss-Legendre quadrature cut at the kernel's
    zeros and at the integrand's kinks.  Linear with scalar images, so both
    declared constants are 1 and both offsets vanish; the operator norm is
    the Lebesgue constant, which grows only logarithmically.
    """

    family_id: ClassVar[str] = "fourier"
    verification_rtol: ClassVar[float] = 1e-8

    domain_space: SpaceDescriptor
    constants: FamilyConstants
    points: tuple[float, ...]
    quadrature_order: int
    smoothing_width: Optional[float]
    eta: float = 0.75

    @property
    def max_row(self) -> int:
        return len(self.points)

    def angle_at(self, row: int) -> float:
        if not (1 <= row <= len(self.points)):
            raise ValueError(
                f"family defines {len(self.points)} target angles, got row {row}"
            )
        return self.points[row - 1]

    def partial_sum(self, order: int, f: PeriodicPoint, angle: float) -> float:
        """Signed value of the order-n partial Fourier sum of f at angle."""
        if order < 0:
            raise ValueError(f"kernel order must be >= 0, got {order}")
        _require_quadrature_order(self.quadrature_order, order)
        cuts = [wrap_angle(angle - dirichlet_zeros(order))] if order else []
        brks = f.breakpoints()
        if brks.size:
            cuts.append(brks)
        pieces = [np.array([-math.pi, math.pi])] + cuts
        edges = np.unique(np.concatenate(pieces))
        per_segment = min(24, max(2, self.quadrature_order // (len(edges) - 1)))
        nodes, weights = _composite_quadrature(edges, per_segment)
        values = f.evaluate(nodes) * dirichlet_kernel(angle - nodes, order)
        return float(np.dot(values, weights) / TWO_PI)

    def op_norm(self, index: int, row: int) -> OpNormValue:
        _validate_index_row(index, row)
        self.angle_at(row)
        return OpNormValue(lebesgue_constant(index, self.quadrature_order), False)

    def image_norm(self, index: int, row: int, x: PeriodicPoint) -> float:
        _validate_index_row(index, row)
        return abs(self.partial_sum(index, x, self.angle_at(row)))

    def norming_direction(self, index: int, row: int) -> PeriodicPoint:
        """Smoothed sign of the kernel centered at the row's angle.

        The plateaus sit at +-1, so the sup norm is exactly 1; the linear
        ramps around each kernel zero cost a small fraction of the ideal
        alignment.  The declared efficiency is conservative; if a width
        ever misses it, the width is halved, up to 4 retries.
        """
        _validate_index_row(index, row)
        t = self.angle_at(row)
        if index == 0:
            return PeriodicPoint([Hump(CONSTANT, 1.0)])
        target = self.eta * self.op_norm(index, row).value
        spacing = TWO_PI / (2 * index + 1)
        width = self.smoothing_width if self.smoothing_width is not None else math.pi / (8 * (index + 1))
        width = min(width, 0.499 * spacing)
        for _ in range(5):
            y = PeriodicPoint([Hump(DIRICHLET_SIGN, 1.0, center=t, width=width, order=index)])
            if self.partial_sum(index, y, t) >= target:
                return y
            width *= 0.5
        raise NormingSearchError(
            f"no smoothing width reached efficiency {self.eta} at order {index}"
        )

    def touched_coordinate_bound(self, index_max: int, row_max: int) -> int:
        # periodic points carry no coordinate truncation
        return 1

    def describe(self) -> dict:
        return {
            "family": self.family_id,
            "points": list(self.points),
            "quadrature_order": self.quadrature_order,
            "smoothing_width": self.smoothing_width,
            "grid_resolution": self.domain_space.grid_resolution,
            "eta": self.eta,
        }


def fourier_family(
    points: tuple[float, ...] | list[float],
    quadrature_order: int = 65536,
    smoothing_width: Optional[float] = None,
    grid_resolution: int = 4096,
) -> FourierFamily:
    if not points:
        raise ValueError("need at least one target angle")
    wrapped = tuple(float(wrap_angle(t)) for t in points)
    if len(set(wrapped)) != len(wrapped):
        raise ValueError(f"target angles must be distinct, got {list(points)}")
    if quadrature_order < 4:
        raise ValueError(f"quadrature_order must be >= 4, got {quadrature_order}")
    if smoothing_width is not None and smoothing_width <= 0.0:
        raise ValueError(f"smoothing_width must be positive, got {smoothing_width}")
    constants = FamilyConstants(
        subadditivity=_one,
        increment=_one,
        index_floor=_floor_one,
        vanishing_offset=_zero_offset,
        drift=_zero_offset,
    )
    return FourierFamily(
        domain_space=periodic_space(grid_resolution),
        constants=constants,
        points=wrapped,
        quadrature_order=quadrature_order,
        smoothing_width=smoothing_width,
    )


@dataclass(frozen=True)
class FakeBoundedFamily:
    """Diagnostic family with constant operator norms; rows never blow up.

    T[n, m](x) = |x_j|.  Satisfies the two sampled inequalities but not the
    blow-up requirement, so the trend check must reject it.
    """

    family_id: ClassVar[str] = "fake-bounded"
    verification_rtol: ClassVar[float] = 0.0
    max_row: ClassVar[Optional[int]] = None

    domain_space: SpaceDescriptor
    constants: FamilyConstants
    eta: float = 1.0

    def target_coordinate(self, index: int, row: int) -> int:
        return pairing_index(index, row)

    def op_norm(self, index: int, row: int) -> OpNormValue:
        _validate_index_row(index, row)
        return OpNormValue(1.0, True)

    def image_norm(self, index: int, row: int, x: CoordinatePoint) -> float:
        _validate_index_row(index, row)
        return abs(x.get(pairing_index(index, row)))

    def norming_direction(self, index: int, row: int) -> CoordinatePoint:
        _validate_index_row(index, row)
        return CoordinatePoint.basis(pairing_index(index, row))

    def touched_coordinate_bound(self, index_max: int, row_max: int) -> int:
        return pairing_index(index_max, row_max) + 1

    def describe(self) -> dict:
        return {"family": self.family_id, "p": self.domain_space.p}


def fake_bounded_family(p: float = 0.5, dimension: Optional[int] = None) -> FakeBoundedFamily:
    space = ell_p_space(p, DEFAULT_TRUNCATION if dimension is None else dimension)
    constants = FamilyConstants(
        subadditivity=_one,
        increment=_one,
        index_floor=_floor_one,
        vanishing_offset=_zero_offset,
        drift=_zero_offset,
    )
    return FakeBoundedFamily(domain_space=space, constants=constants)


def build_family(
    family_id: str,
    *,
    p: float = 0.5,
    eta: Optional[float] = None,
    dimension: Optional[int] = None,
    points: tuple[float, ...] | list[float] = (),
    quadrature_order: int = 65536,
    smoothing_width: Optional[float] = None,
    grid_resolution: int = 4096,
) -> OperatorFamily:
    """Construct a shipped family (or the diagnostic one) by identifier."""
    if family_id == "coordinate":
        return coordinate_family(p, 1.0 if eta is None else eta, dimension)
    if family_id == "nonlinear-gal":
        return nonlinear_gal_family(p, dimension)
    if family_id == "fourier":
        return fourier_family(points, quadrature_order, smoothing_width, grid_resolution)
    if family_id == "fake-bounded":
        return fake_bounded_family(p, dimension)
    raise ValueError(f"unknown family {family_id!r}; known: {DIAGNOSTIC_FAMILY_IDS}")


def family_from_description(description: dict) -> OperatorFamily:
    """Rebuild a family from its describe() snapshot (used by trace replay)."""
    d = dict(description)
    family_id = d.pop("family")
    if family_id == "fourier":
        return fourier_family(
            tuple(d["points"]),
            int(d["quadrature_order"]),
            d.get("smoothing_width"),
            int(d.get("grid_resolution", 4096)),
        )
    return build_family(
        family_id,
        p=float(d.get("p", 0.5)),
        eta=d.get("eta"),
        dimension=d.get("dimension"),
    )
