"""Period vectors b_{S,h}, Kuznecov weights N(S)_h and cumulative Kuznecov sums."""
import math
from dataclasses import dataclass

import numpy as np

from .curves import SphereLatitudeCircle, TorusLine, TorusSubtorus, quadrature
from .errors import DomainError, PoorFit, QuadratureNotConverged
from .harmonics import normalized_legendre
from .spectral import (SPHERE, TORUS, _floor_sq, enumerate_ball, enumerate_cluster, evaluate_modes,
                       frequency_cutoff, window_bounds)

__all__ = [
    "PeriodVector", "KuznecovPrediction", "period_vector", "closed_form_periods",
    "quadrature_periods", "squared_norm", "kuznecov_weight", "kuznecov_cumulative",
    "fit_kuznecov_leading", "period_table",
]

REFINE_RTOL = 1e-8
_NODE_CHUNK = 4096


def squared_norm(components):
    """sum |c_j|^2, exactly rounded, so any permutation gives the same bits.

    Squares of the real and imaginary parts are correctly rounded on every
    code path (unlike a vectorized complex modulus), and fsum is exact.
    """
    c = np.asarray(components)
    return math.fsum((c.real ** 2).tolist() + (c.imag ** 2).tolist())


@dataclass(frozen=True, eq=False)
class PeriodVector:
    cluster: object
    components: np.ndarray
    squared_norm: float

    @property
    def norm(self):
        return math.sqrt(self.squared_norm)


@dataclass(frozen=True)
class KuznecovPrediction:
    leading_coefficient: float
    exponent: int
    fitted_exponent: float
    remainder_coefficient: float


def _check_ambient(manifold, sub):
    if sub.ambient != manifold:
        raise DomainError(f"submanifold lives in {sub.ambient}, cluster in {manifold}")


def _latitude_periods(labels, sub):
    # the phi integral kills m != 0; what is left is 2 pi sin(theta0) Y_l0(theta0)
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros(labels.shape[0], dtype=complex)
    zonal = labels[:, 1] == 0
    if np.any(zonal):
        lmax = int(labels[zonal, 0].max())
        y = normalized_legendre(0, lmax, [sub.colatitude])[:, 0]
        out[zonal] = sub.volume * y[labels[zonal, 0]]
    return out


def closed_form_periods(manifold, labels, sub):
    """Exact integrals of torus modes over a straight segment or coordinate subtorus,
    and of spherical harmonics over a latitude circle."""
    _check_ambient(manifold, sub)
    if manifold.kind == SPHERE and isinstance(sub, SphereLatitudeCircle):
        return _latitude_periods(labels, sub)
    if manifold.kind != TORUS:
        raise DomainError(f"no closed form for {type(sub).__name__}")
    labels = np.asarray(labels, dtype=np.int64)
    norm = 1.0 / math.sqrt(manifold.volume)
    if isinstance(sub, TorusSubtorus):
        free = list(sub.free_axes)
        phase = np.ones(labels.shape[0], dtype=complex)
        for ax, val in sub.fixed:
            phase = phase * np.exp(1j * labels[:, ax] * val)
        on = np.all(labels[:, free] == 0, axis=1)
        return np.where(on, sub.volume * norm * phase, 0.0 + 0.0j)
    if not isinstance(sub, TorusLine):
        raise DomainError(f"no closed form for {type(sub).__name__}")
    phase = np.exp(1j * (labels @ np.asarray(sub.base, dtype=float)))
    L = sub.length
    ints = sub.integer_direction
    if sub.closed:
        kv = labels @ np.asarray(ints, dtype=np.int64)
        seg = np.where(kv == 0, L, 0.0)
    else:
        omega = labels @ sub.unit_direction
        # int_0^L e^{i w s} ds = L e^{i w L/2} sinc(w L / 2 pi)
        seg = L * np.exp(0.5j * omega * L) * np.sinc(omega * L / (2.0 * math.pi))
    return norm * phase * seg


def quadrature_periods(manifold, labels, sub, max_frequency, refine=1):
    _check_ambient(manifold, sub)
    rule = quadrature(sub, max_frequency, refine=refine)
    pts = sub.points(rule.nodes)
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros(labels.shape[0], dtype=complex)
    for start in range(0, len(rule), _NODE_CHUNK):
        stop = start + _NODE_CHUNK
        out += rule.weights[start:stop] @ evaluate_modes(manifold, labels, pts[start:stop])
    return out


def _converged_quadrature(manifold, labels, sub, max_frequency):
    coarse = quadrature_periods(manifold, labels, sub, max_frequency, refine=1)
    fine = quadrature_periods(manifold, labels, sub, max_frequency, refine=2)
    scale = max(float(np.max(np.abs(fine), initial=0.0)), 1e-6 * sub.volume)
    err = float(np.max(np.abs(fine - coarse), initial=0.0))
    if err > REFINE_RTOL * scale:
        raise QuadratureNotConverged(
            f"doubling the nodes moved a period component by {err:.3e} (scale {scale:.3e})")
    return fine


def _has_closed_form(manifold, sub):
    if manifold.kind == SPHERE:
        return isinstance(sub, SphereLatitudeCircle)
    return isinstance(sub, (TorusLine, TorusSubtorus))


def period_vector(cluster, sub, method="auto"):
    """Periods of every cluster mode over ``sub``, in cluster order.

    ``method`` is "auto" (closed form on tori and latitude circles, checked quadrature elsewhere),
    "closed_form" or "quadrature".
    """
    _check_ambient(cluster.manifold, sub)
    if method == "auto":
        method = "closed_form" if _has_closed_form(cluster.manifold, sub) else "quadrature"
    if method == "closed_form":
        comps = closed_form_periods(cluster.manifold, cluster.labels, sub)
    elif method == "quadrature":
        comps = _converged_quadrature(cluster.manifold, cluster.labels, sub, cluster.max_frequency)
    else:
        raise ValueError(f"unknown method {method!r}")
    comps.setflags(write=False)
    return PeriodVector(cluster, comps, squared_norm(comps))


def _support_generator(manifold, sub):
    """Primitive w such that the modes with nonzero period are exactly the multiples j*w, or None."""
    if manifold.kind != TORUS:
        return None
    if isinstance(sub, TorusSubtorus):
        w = np.zeros(manifold.dim, dtype=np.int64)
        w[sub.fixed[0][0]] = 1
        return w
    if isinstance(sub, TorusLine) and sub.closed and manifold.dim == 2:
        p, q = sub.integer_direction
        return np.array([-q, p], dtype=np.int64)
    return None


def _support_labels(w, lo_sq, hi_sq):
    """Multiples j*w with lo_sq < j^2 |w|^2 <= hi_sq."""
    wsq = int(w @ w)
    jmax = math.isqrt(hi_sq // wsq)
    js = np.arange(-jmax, jmax + 1, dtype=np.int64)
    fsq = js * js * wsq
    keep = fsq > lo_sq
    return js[keep, None] * w[None, :], fsq[keep]


def kuznecov_weight(manifold, window, h, sub):
    """N(S)_h = |b_{S,h}|^2 without building the full cluster when only a sublattice contributes."""
    w = _support_generator(manifold, sub)
    if w is None:
        return period_vector(enumerate_cluster(manifold, window, h), sub).squared_norm
    lo, hi = window_bounds(window, h)
    labels, _ = _support_labels(w, _floor_sq(lo), _floor_sq(hi))
    return squared_norm(closed_form_periods(manifold, labels, sub))


def kuznecov_cumulative(manifold, sub, h_min, points=16):
    """[(h, E(h, S))] on a log-spaced h grid from 1 down to ``h_min``.

    E(h, S) sums |int_S phi_j|^2 over every mode with frequency <= 1/h,
    constant mode included.
    """
    if not 0 < h_min <= 1:
        raise DomainError(f"h_min must lie in (0, 1], got {h_min}")
    _check_ambient(manifold, sub)
    radius = frequency_cutoff(h_min)
    hi_sq = _floor_sq(radius)
    w = _support_generator(manifold, sub)
    if w is not None:
        labels, fsq = _support_labels(w, -1, hi_sq)
        sq = np.abs(closed_form_periods(manifold, labels, sub)) ** 2
    else:
        labels, fsq = enumerate_ball(manifold, radius)
        if _has_closed_form(manifold, sub):
            comps = closed_form_periods(manifold, labels, sub)
        else:
            comps = _converged_quadrature(manifold, labels, sub, max(radius, 1.0))
        sq = np.abs(comps) ** 2
    hs = np.array([1.0]) if h_min == 1 else np.geomspace(1.0, h_min, points)
    out = []
    for h in hs:
        cut = _floor_sq(frequency_cutoff(float(h)))
        out.append((float(h), math.fsum(np.sort(sq[fsq <= cut]).tolist())))
    return out


def fit_kuznecov_leading(data, exponent):
    """Fit E(h) ~ c h^-exponent + c1 h^(1-exponent) and check the free log-log slope.

    Raises PoorFit when the free slope misses ``exponent`` by more than 0.2.
    """
    h = np.array([d[0] for d in data], dtype=float)
    E = np.array([d[1] for d in data], dtype=float)
    if h.size < 5 or h.max() / h.min() < 4:
        raise DomainError("need >= 5 points spanning a factor >= 4 in h")
    pos = E > 0
    slope = np.polyfit(np.log(h[pos]), np.log(E[pos]), 1)[0] if pos.sum() >= 2 else 0.0
    fitted = -float(slope)
    if abs(fitted - exponent) > 0.2:
        raise PoorFit(f"fitted exponent {fitted:.3f} is not within 0.2 of {exponent}")
    basis = np.stack([h ** -exponent, h ** (1.0 - exponent)], axis=1)
    (c, c1), *_ = np.linalg.lstsq(basis, E, rcond=None)
    return KuznecovPrediction(float(c), int(exponent), fitted, float(c1))


def period_table(pv):
    """(header, rows) for CSV export: one row per mode, cluster order."""
    rows = [(lab, float(c.real), float(c.imag))
            for lab, c in zip(pv.cluster.label_strings(), pv.components)]
    return ["modeLabel", "re", "im"], rows
