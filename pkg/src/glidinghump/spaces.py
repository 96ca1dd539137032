"""Concrete quasi-normed spaces with explicitly known p-norm exponents.

Three kinds are provided:

* ``ell_p``: finite truncations of little ell^p with p in (0, 1].  Points are
  stored sparsely (index -> coefficient) because condensation runs touch
  coordinates whose indices grow far beyond anything a dense array could
  hold; the descriptor's ``dimension`` is an upper bound on admissible
  indices, not an allocation size.
* ``periodic``: continuous 2*pi-periodic functions under the sup norm.
  Points are finite formal sums of primitive humps, each evaluable at any
  angle.  Every hump kind is piecewise linear, so the sup norm of a sum is
  attained at a hump breakpoint; the norm below is therefore exact for
  representable points (the uniform grid is kept as a safety net and covers
  the kink-free case).
* ``scalar``: the real line under absolute value.

For all three, the quasi-norm satisfies definiteness, absolute homogeneity,
and the quasi-triangle inequality with modulus of concavity K; the ell_p
kind additionally satisfies the p-th power triangle inequality
``|x+y|^p <= |x|^p + |y|^p`` exactly, with K = 2^(1/p - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

ELL_P = "ell_p"
PERIODIC = "periodic"
SCALAR = "scalar"
KINDS = (ELL_P, PERIODIC, SCALAR)

TWO_PI = 2.0 * math.pi


class DimensionMismatchError(ValueError):
    """A point refers to a coordinate outside the space truncation."""


class NonFiniteCoefficientError(ValueError):
    """A point carries a NaN or infinite coefficient."""


@dataclass(frozen=True)
class SpaceDescriptor:
    """Which space a computation runs in.

    ``p`` is meaningful for the ell_p kind (the norm exponent); the periodic
    and scalar kinds are genuinely normed and carry p = 1.  ``dimension``
    bounds admissible coordinate indices for ell_p.  ``grid_resolution`` is
    the uniform sampling density used when evaluating periodic sup norms.
    """

    kind: str
    p: float = 1.0
    dimension: int = 1
    grid_resolution: int = 4096

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if not (0.0 < self.p <= 1.0):
            raise ValueError(f"norm exponent p must lie in (0, 1], got {self.p}")
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.grid_resolution < 16:
            raise ValueError(
                f"grid_resolution must be >= 16, got {self.grid_resolution}"
            )


def ell_p_space(p: float, dimension: int, grid_resolution: int = 4096) -> SpaceDescriptor:
    """Sparse truncation of ell^p holding coordinates 1..dimension."""
    return SpaceDescriptor(kind=ELL_P, p=p, dimension=dimension, grid_resolution=grid_resolution)


def periodic_space(grid_resolution: int = 4096) -> SpaceDescriptor:
    """Continuous 2*pi-periodic functions under the sup norm."""
    return SpaceDescriptor(kind=PERIODIC, p=1.0, dimension=1, grid_resolution=grid_resolution)


def scalar_space() -> SpaceDescriptor:
    return SpaceDescriptor(kind=SCALAR, p=1.0, dimension=1)


def wrap_angle(t):
    """Map angles into [-pi, pi), elementwise for arrays."""
    return (np.asarray(t, dtype=float) + math.pi) % TWO_PI - math.pi


def _check_finite(value: float) -> float:
    v = float(value)
    if not math.isfinite(v):
        raise NonFiniteCoefficientError(f"non-finite coefficient {value!r}")
    return v


class CoordinatePoint:
    """Sparse vector with 1-based integer coordinate indices.

    Immutable by convention; arithmetic returns new points.  Zero
    coefficients are dropped so that structural equality matches
    mathematical equality.
    """

    __slots__ = ("coords",)

    def __init__(self, coords: Union[Mapping[int, float], Iterable[tuple[int, float]], None] = None):
        items = coords.items() if isinstance(coords, Mapping) else (coords or ())
        store: dict[int, float] = {}
        for index, value in items:
            if not isinstance(index, int) or index < 1:
                raise ValueError(f"coordinate indices are 1-based integers, got {index!r}")
            v = _check_finite(value)
            if v != 0.0:
                store[index] = v
        object.__setattr__(self, "coords", store)

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "CoordinatePoint":
        return cls({i + 1: float(v) for i, v in enumerate(values)})

    @classmethod
    def basis(cls, index: int, value: float = 1.0) -> "CoordinatePoint":
        return cls({index: value})

    @classmethod
    def zero(cls) -> "CoordinatePoint":
        return cls()

    def get(self, index: int) -> float:
        return self.coords.get(index, 0.0)

    @property
    def max_index(self) -> int:
        return max(self.coords) if self.coords else 1

    def __add__(self, other: "CoordinatePoint") -> "CoordinatePoint":
        merged = dict(self.coords)
        for i, v in other.coords.items():
            merged[i] = merged.get(i, 0.0) + v
        return CoordinatePoint(merged)

    def __sub__(self, other: "CoordinatePoint") -> "CoordinatePoint":
        merged = dict(self.coords)
        for i, v in other.coords.items():
            merged[i] = merged.get(i, 0.0) - v
        return CoordinatePoint(merged)

    def scale(self, factor: float) -> "CoordinatePoint":
        f = _check_finite(factor)
        return CoordinatePoint({i: f * v for i, v in self.coords.items()})

    def __mul__(self, factor: float) -> "CoordinatePoint":
        return self.scale(factor)

    __rmul__ = __mul__

    def __neg__(self) -> "CoordinatePoint":
        return self.scale(-1.0)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CoordinatePoint) and self.coords == other.coords

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}: {v!r}" for i, v in sorted(self.coords.items())[:6])
        tail = ", ..." if len(self.coords) > 6 else ""
        return f"CoordinatePoint({{{inner}{tail}}})"


# hump kinds for the periodic representation
CONSTANT = "constant"
TENT = "tent"
DIRICHLET_SIGN = "dirichlet_sign"
HUMP_KINDS = (CONSTANT, TENT, DIRICHLET_SIGN)


@dataclass(frozen=True)
class Hump:
    """One primitive periodic hump, pointwise bounded by |amplitude|.

    * ``constant``: the constant function amplitude.
    * ``tent``: triangular bump, apex at ``center``, support half-width
      ``width``.
    * ``dirichlet_sign``: the sign profile of the order-``order`` Dirichlet
      kernel centered at ``center``, linearly ramped to 0 over a window of
      half-width ``width`` around each sign change, then scaled by
      ``amplitude``.  The profile takes values in [-1, 1] and equals +-1 on
      the plateaus between windows.
    """

    kind: str
    amplitude: float
    center: float = 0.0
    width: float = 0.0
    order: int = 0

    def __post_init__(self) -> None:
        if self.kind not in HUMP_KINDS:
            raise ValueError(f"unknown hump kind {self.kind!r}")
        _check_finite(self.amplitude)
        _check_finite(self.center)
        _check_finite(self.width)
        if self.kind == TENT and self.width <= 0.0:
            raise ValueError("tent humps need positive width")
        if self.kind == DIRICHLET_SIGN:
            if self.order < 0:
                raise ValueError("dirichlet_sign order must be >= 0")
            if self.order > 0:
                spacing = TWO_PI / (2 * self.order + 1)
                if not (0.0 < self.width < spacing / 2):
                    raise ValueError(
                        "dirichlet_sign width must lie in (0, spacing/2) so ramp "
                        f"windows stay disjoint; got width={self.width}, spacing={spacing}"
                    )

    def merge_key(self) -> tuple:
        return (self.kind, self.center, self.width, self.order)

    def profile(self, angles: np.ndarray) -> np.ndarray:
        """The unit-amplitude shape, values in [-1, 1]."""
        s = np.asarray(angles, dtype=float)
        if self.kind == CONSTANT:
            return np.ones_like(s)
        if self.kind == TENT:
            d = np.abs(wrap_angle(s - self.center))
            return np.maximum(0.0, 1.0 - d / self.width)
        return _dirichlet_sign_profile(s, self.center, self.width, self.order)

    def evaluate(self, angles: np.ndarray) -> np.ndarray:
        return self.amplitude * self.profile(angles)

    def breakpoints(self) -> np.ndarray:
        """Angles where the hump's piecewise-linear shape has a kink."""
        if self.kind == CONSTANT:
            return np.empty(0)
        if self.kind == TENT:
            return wrap_angle(np.array([self.center - self.width, self.center, self.center + self.width]))
        if self.order == 0:
            return np.empty(0)
        zeros = dirichlet_zeros(self.order)
        pts = np.concatenate([
            self.center - zeros - self.width,
            self.center - zeros,
            self.center - zeros + self.width,
        ])
        return wrap_angle(pts)


def dirichlet_kernel(u, order: int) -> np.ndarray:
    """Dirichlet kernel D_n(u) = sin((n + 1/2) u) / sin(u / 2), vectorized.

    Stable at the removable singularity u = 0 via a short even Taylor
    expansion; 2*pi-periodic in u.
    """
    u = wrap_angle(u)
    v = 0.5 * u
    m = 2 * order + 1
    out = np.empty_like(v)
    small = np.abs(v) < 1e-7
    if np.any(small):
        vs = v[small]
        out[small] = m * (1.0 - (m * m - 1.0) * vs * vs / 6.0)
    big = ~small
    if np.any(big):
        vb = v[big]
        out[big] = np.sin(m * vb) / np.sin(vb)
    return out


def dirichlet_zeros(order: int) -> np.ndarray:
    """Zeros of D_n in (-pi, pi): u = 2*pi*j/(2n+1), j = -n..-1, 1..n."""
    if order == 0:
        return np.empty(0)
    j = np.concatenate([np.arange(-order, 0), np.arange(1, order + 1)])
    return TWO_PI * j / (2 * order + 1)


def _dirichlet_sign_profile(s: np.ndarray, center: float, width: float, order: int) -> np.ndarray:
    if order == 0:
        return np.ones_like(np.asarray(s, dtype=float))
    u = wrap_angle(center - np.asarray(s, dtype=float))
    spacing = TWO_PI / (2 * order + 1)
    base = np.sign(dirichlet_kernel(u, order))
    base = np.where(base == 0.0, 1.0, base)
    # distance to the nearest sign change (the nearest nonzero multiple of
    # spacing that lies inside (-pi, pi))
    j = np.round(u / spacing)
    dist = np.full_like(u, np.inf)
    for dj in (-1.0, 0.0, 1.0):
        jj = j + dj
        valid = (jj != 0.0) & (np.abs(jj) <= order)
        cand = np.where(valid, np.abs(u - jj * spacing), np.inf)
        dist = np.minimum(dist, cand)
    ramp = np.where(dist >= width, 1.0, dist / width)
    return base * ramp


class PeriodicPoint:
    """Finite formal sum of humps; evaluable at any angle."""

    __slots__ = ("humps",)

    def __init__(self, humps: Iterable[Hump] = ()):
        merged: dict[tuple, Hump] = {}
        for h in humps:
            key = h.merge_key()
            if key in merged:
                amp = merged[key].amplitude + h.amplitude
                merged[key] = Hump(h.kind, amp, h.center, h.width, h.order)
            else:
                merged[key] = h
        object.__setattr__(self, "humps", tuple(h for h in merged.values() if h.amplitude != 0.0))

    @classmethod
    def zero(cls) -> "PeriodicPoint":
        return cls()

    def evaluate(self, angles) -> np.ndarray:
        s = np.asarray(angles, dtype=float)
        total = np.zeros_like(s)
        for h in self.humps:
            total += h.evaluate(s)
        return total

    def breakpoints(self) -> np.ndarray:
        parts = [h.breakpoints() for h in self.humps]
        parts = [p for p in parts if p.size]
        return np.unique(np.concatenate(parts)) if parts else np.empty(0)

    def __add__(self, other: "PeriodicPoint") -> "PeriodicPoint":
        return PeriodicPoint(self.humps + other.humps)

    def __sub__(self, other: "PeriodicPoint") -> "PeriodicPoint":
        return self + other.scale(-1.0)

    def scale(self, factor: float) -> "PeriodicPoint":
        f = _check_finite(factor)
        return PeriodicPoint(
            Hump(h.kind, f * h.amplitude, h.center, h.width, h.order) for h in self.humps
        )

    def __mul__(self, factor: float) -> "PeriodicPoint":
        return self.scale(factor)

    __rmul__ = __mul__

    def __neg__(self) -> "PeriodicPoint":
        return self.scale(-1.0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PeriodicPoint):
            return False
        return sorted(self.humps, key=Hump.merge_key) == sorted(other.humps, key=Hump.merge_key)

    def __repr__(self) -> str:
        return f"PeriodicPoint({list(self.humps)!r})"


@dataclass(frozen=True)
class ScalarPoint:
    value: float

    def __post_init__(self) -> None:
        _check_finite(self.value)

    def __add__(self, other: "ScalarPoint") -> "ScalarPoint":
        return ScalarPoint(self.value + other.value)

    def __sub__(self, other: "ScalarPoint") -> "ScalarPoint":
        return ScalarPoint(self.value - other.value)

    def scale(self, factor: float) -> "ScalarPoint":
        return ScalarPoint(factor * self.value)

    def __mul__(self, factor: float) -> "ScalarPoint":
        return self.scale(factor)

    __rmul__ = __mul__


Point = Union[CoordinatePoint, PeriodicPoint, ScalarPoint]


def _require_kind(space: SpaceDescriptor, x: Point) -> None:
    ok = (
        (space.kind == ELL_P and isinstance(x, CoordinatePoint))
        or (space.kind == PERIODIC and isinstance(x, PeriodicPoint))
        or (space.kind == SCALAR and isinstance(x, ScalarPoint))
    )
    if not ok:
        raise TypeError(f"point type {type(x).__name__} does not live in a {space.kind} space")


def p_power_sum(space: SpaceDescriptor, x: CoordinatePoint) -> float:
    """Sum of |x_i|^p for an ell_p point, exactly rounded via fsum.

    Exposed separately so tail-bound checks can compare power sums directly,
    without the lossy ^(1/p) then ^p round trip.
    """
    if space.kind != ELL_P:
        raise TypeError("p_power_sum applies to ell_p spaces only")
    _require_kind(space, x)
    if x.coords and x.max_index > space.dimension:
        raise DimensionMismatchError(
            f"coordinate {x.max_index} exceeds space dimension {space.dimension}"
        )
    return math.fsum(abs(v) ** space.p for v in x.coords.values())


def quasi_norm(space: SpaceDescriptor, x: Point) -> float:
    """The space's quasi-norm of x.

    ell_p: (sum |x_i|^p)^(1/p), with a fast path returning |x_i| exactly for
    single-coordinate points.  periodic: sup of |x| over the uniform grid
    joined with all hump breakpoints (exact for piecewise-linear sums).
    scalar: |x|.
    """
    _require_kind(space, x)
    if space.kind == ELL_P:
        if not x.coords:
            return 0.0
        if len(x.coords) == 1:
            if x.max_index > space.dimension:
                raise DimensionMismatchError(
                    f"coordinate {x.max_index} exceeds space dimension {space.dimension}"
                )
            return abs(next(iter(x.coords.values())))
        return p_power_sum(space, x) ** (1.0 / space.p)
    if space.kind == PERIODIC:
        if not x.humps:
            return 0.0
        grid = np.linspace(-math.pi, math.pi, space.grid_resolution, endpoint=False)
        brks = x.breakpoints()
        pts = np.concatenate([grid, brks]) if brks.size else grid
        return float(np.max(np.abs(x.evaluate(pts))))
    return abs(x.value)


def modulus_of_concavity(space: SpaceDescriptor) -> float:
    """Smallest K with |x + y| <= K(|x| + |y|): 2^(1/p - 1) for ell_p, else 1."""
    if space.kind == ELL_P:
        return 2.0 ** (1.0 / space.p - 1.0)
    return 1.0


def ball_membership(space: SpaceDescriptor, center: Point, radius: float, y: Point) -> bool:
    """Whether y lies in the closed quasi-norm ball of the given radius."""
    if not math.isfinite(radius) or radius < 0.0:
        raise ValueError(f"radius must be finite and >= 0, got {radius}")
    return quasi_norm(space, y - center) <= radius


def zero_point(space: SpaceDescriptor) -> Point:
    """The zero element of the given space."""
    if space.kind == ELL_P:
        return CoordinatePoint.zero()
    if space.kind == PERIODIC:
        return PeriodicPoint.zero()
    return ScalarPoint(0.0)
