"""Curves and coordinate subtori with their induced measure, plus quadrature.

Every submanifold is parameterized by arclength (area for subtori), so
quadrature weights carry the induced measure directly and sum to the volume.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainError, InvalidDirection, InvalidLength
from .spectral import Manifold

__all__ = [
    "TorusLine", "TorusSubtorus", "SphereGreatArc", "SphereLatitudeCircle",
    "QuadratureRule", "build_submanifold", "node_count", "quadrature",
]

TWO_PI = 2.0 * math.pi


def _integer_vector(direction):
    vals = [float(v) for v in direction]
    if all(v == int(v) for v in vals):
        return tuple(int(v) for v in vals)
    return None


@dataclass(frozen=True)
class TorusLine:
    """Segment ``s -> base + s * direction/|direction|`` for s in [0, length)."""

    base: tuple
    direction: tuple
    length: float
    closed: bool

    dim = 1

    def __post_init__(self):
        if len(self.base) != len(self.direction) or len(self.base) not in (2, 3):
            raise DomainError("torus line needs base and direction of equal length 2 or 3")
        if not any(self.direction):
            raise InvalidDirection("direction vector is zero")
        ints = _integer_vector(self.direction)
        if ints is not None and math.gcd(*ints) != 1:
            raise InvalidDirection(f"integer direction {ints} is not primitive (gcd != 1)")
        if not self.length > 0:
            raise InvalidLength(f"length must be positive, got {self.length}")
        if self.closed:
            if ints is None:
                raise InvalidDirection("closed torus geodesics need an integer direction")
            period = TWO_PI * math.sqrt(sum(v * v for v in ints))
            if not math.isclose(self.length, period, rel_tol=1e-12):
                raise InvalidLength(f"closed geodesic with direction {ints} has length {period}, "
                                    f"got {self.length}")

    @property
    def ambient(self):
        return Manifold.torus(len(self.base))

    @property
    def volume(self):
        return self.length

    @property
    def integer_direction(self):
        return _integer_vector(self.direction)

    @property
    def unit_direction(self):
        v = np.asarray(self.direction, dtype=float)
        return v / np.linalg.norm(v)

    def points(self, s):
        s = np.asarray(s, dtype=float)
        return np.asarray(self.base, dtype=float)[None, :] + s[:, None] * self.unit_direction[None, :]


@dataclass(frozen=True)
class TorusSubtorus:
    """Coordinate 2-subtorus of T^3 obtained by fixing one angle."""

    fixed: tuple  # ((axis, value), ...)
    ambient_dim: int = 3

    closed = True

    def __post_init__(self):
        if self.ambient_dim != 3 or len(self.fixed) != 1:
            raise DomainError("coordinate subtori are supported as 2-tori inside T^3 (one fixed angle)")
        axis = self.fixed[0][0]
        if axis not in (0, 1, 2):
            raise DomainError(f"fixed axis must be 0, 1 or 2, got {axis}")

    @property
    def ambient(self):
        return Manifold.torus(self.ambient_dim)

    @property
    def dim(self):
        return self.ambient_dim - len(self.fixed)

    @property
    def free_axes(self):
        fixed = {ax for ax, _ in self.fixed}
        return tuple(i for i in range(self.ambient_dim) if i not in fixed)

    @property
    def volume(self):
        return TWO_PI ** self.dim

    def points(self, nodes):
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        out = np.empty((nodes.shape[0], self.ambient_dim))
        for ax, val in self.fixed:
            out[:, ax] = val
        for j, ax in enumerate(self.free_axes):
            out[:, ax] = nodes[:, j]
        return out


@dataclass(frozen=True)
class SphereGreatArc:
    """Arc ``t -> cos t e1 + sin t e2`` of a great circle, t in [start, start + length]."""

    e1: tuple
    e2: tuple
    length: float
    start: float = 0.0

    dim = 1

    def __post_init__(self):
        a = np.asarray(self.e1, dtype=float)
        b = np.asarray(self.e2, dtype=float)
        if a.shape != (3,) or b.shape != (3,):
            raise DomainError("great arc frame vectors must be 3-vectors")
        if abs(a @ a - 1) > 1e-12 or abs(b @ b - 1) > 1e-12 or abs(a @ b) > 1e-12:
            raise DomainError("great arc frame (e1, e2) must be orthonormal")
        if not 0 < self.length <= TWO_PI * (1 + 1e-15):
            raise InvalidLength(f"great arc length must lie in (0, 2 pi], got {self.length}")

    @property
    def closed(self):
        return math.isclose(self.length, TWO_PI, rel_tol=1e-15)

    @property
    def ambient(self):
        return Manifold.sphere()

    @property
    def volume(self):
        return self.length

    def points(self, s):
        t = np.asarray(s, dtype=float)
        xyz = (np.cos(t)[:, None] * np.asarray(self.e1, dtype=float)[None, :]
               + np.sin(t)[:, None] * np.asarray(self.e2, dtype=float)[None, :])
        theta = np.arccos(np.clip(xyz[:, 2], -1.0, 1.0))
        phi = np.arctan2(xyz[:, 1], xyz[:, 0])
        return np.stack([theta, phi], axis=1)


@dataclass(frozen=True)
class SphereLatitudeCircle:
    colatitude: float

    dim = 1
    closed = True

    def __post_init__(self):
        if not 0 < self.colatitude < math.pi:
            raise DomainError(f"colatitude must lie in (0, pi), got {self.colatitude}")

    @property
    def ambient(self):
        return Manifold.sphere()

    @property
    def volume(self):
        return TWO_PI * math.sin(self.colatitude)

    def points(self, s):
        s = np.asarray(s, dtype=float)
        phi = s / math.sin(self.colatitude)
        return np.stack([np.full_like(s, self.colatitude), phi], axis=1)


_KINDS = {
    "torus_line": TorusLine,
    "torus_subtorus": TorusSubtorus,
    "sphere_great_arc": SphereGreatArc,
    "sphere_latitude": SphereLatitudeCircle,
}


def build_submanifold(kind, **params):
    """Validate a submanifold description (the ``submanifold`` block of a config).

    >>> build_submanifold("torus_line", base=[0, 0], direction=[1, 1], closed=True).length
    8.885765876316732
    """
    if kind not in _KINDS:
        raise DomainError(f"unknown submanifold kind {kind!r}; expected one of {sorted(_KINDS)}")
    if kind == "torus_line":
        direction = tuple(params.pop("direction"))
        base = tuple(float(v) for v in params.pop("base", (0.0,) * len(direction)))
        closed = bool(params.pop("closed", False))
        length = params.pop("length", None)
        if length is None:
            if not closed:
                raise InvalidLength("open torus segments need an explicit length")
            ints = _integer_vector(direction)
            if ints is None:
                raise InvalidDirection("closed torus geodesics need an integer direction")
            length = TWO_PI * math.sqrt(sum(v * v for v in ints))
        sub = TorusLine(base, direction, float(length), closed)
    elif kind == "torus_subtorus":
        fixed = tuple((int(ax), float(val)) for ax, val in params.pop("fixed"))
        sub = TorusSubtorus(fixed, int(params.pop("ambient_dim", 3)))
    elif kind == "sphere_great_arc":
        sub = SphereGreatArc(tuple(params.pop("e1")), tuple(params.pop("e2")),
                             float(params.pop("length", TWO_PI)), float(params.pop("start", 0.0)))
    else:
        sub = SphereLatitudeCircle(float(params.pop("colatitude")))
    if params:
        raise DomainError(f"unexpected parameters for {kind}: {sorted(params)}")
    return sub


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray    # parameter values, (P,) or (P, d) for subtori
    weights: np.ndarray  # induced measure, (P,)
    kind: str

    def __len__(self):
        return int(self.weights.size)


def node_count(length, max_frequency):
    """max(64, ceil(4 L f / 2 pi) * 8): at least 32 nodes per shortest wavelength."""
    return max(64, math.ceil(4.0 * length * max_frequency / TWO_PI) * 8)


def _trapezoid(length, m, start=0.0):
    nodes = start + length * np.arange(m) / m
    return nodes, np.full(m, length / m)


def quadrature(sub, max_frequency, refine=1):
    """Rule resolving modes up to ``max_frequency`` on ``sub``; ``refine`` multiplies the node count."""
    if isinstance(sub, TorusSubtorus):
        m = node_count(TWO_PI, max_frequency) * refine
        x, w = _trapezoid(TWO_PI, m)
        g = np.stack(np.meshgrid(*([x] * sub.dim), indexing="ij"), axis=-1).reshape(-1, sub.dim)
        wt = np.prod(np.stack(np.meshgrid(*([w] * sub.dim), indexing="ij"), axis=-1), axis=-1).ravel()
        return QuadratureRule(g, wt, "tensor-trapezoid")
    m = node_count(sub.volume, max_frequency) * refine
    start = getattr(sub, "start", 0.0)
    if sub.closed:
        x, w = _trapezoid(sub.volume, m, start)
        return QuadratureRule(x, w, "trapezoid")
    t, w = roots_legendre(m)
    half = 0.5 * sub.volume
    return QuadratureRule(start + half * (t + 1.0), half * w, "gauss-legendre")
