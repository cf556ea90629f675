"""Uniform random elements of the L^2 unit sphere of a cluster.

A sample is u = sum_k z_k phi_k with z uniform on the unit sphere of C^N,
drawn as a normalized vector of 2N independent standard normals.  The normals
for sample ``i`` come from a Philox stream keyed by ``(seed, i)``, so every
sample can be regenerated alone and in any order.

Batched evaluation always runs over fixed-size chunks of sample indices; the
worker count only decides which thread handles which chunk, so outputs are
bitwise independent of it.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .curves import TorusLine, TorusSubtorus
from .errors import DegenerateDraw, DomainError
from .spectral import TORUS, evaluate_modes, evaluate_modes_at_point

__all__ = [
    "CoefficientVector", "RandomFieldSample", "sample_coefficients", "coefficient_block",
    "map_samples", "period_rv", "field_eval", "lq_norm_rv", "RestrictedField", "CHUNK",
]

_MAX_RETRIES = 8
CHUNK = 512
_TWO_PI = 2.0 * math.pi
_INV_2_53 = 2.0 ** -53


def _philox_state(seed, index, attempt):
    if seed < 0 or index < 0 or seed >> 64 or index >> 64:
        raise DomainError("seed and sample index must be 64-bit nonnegative integers")
    return {
        "bit_generator": "Philox",
        "state": {"counter": np.array([0, 0, 0, attempt], dtype=np.uint64),
                  "key": np.array([seed, index], dtype=np.uint64)},
        "buffer": np.zeros(4, dtype=np.uint64),
        "buffer_pos": 4,
        "has_uint32": 0,
        "uinteger": 0,
    }


def _box_muller(raw, n):
    """n complex normals (independent N(0,1) real and imaginary parts) per row of 2n raw words."""
    u1 = ((raw[:, :n] >> np.uint64(11)).astype(float) + 1.0) * _INV_2_53  # (0, 1]
    u2 = (raw[:, n:] >> np.uint64(11)).astype(float) * _INV_2_53          # [0, 1)
    r = np.sqrt(-2.0 * np.log(u1))
    return r * np.cos(_TWO_PI * u2) + 1j * (r * np.sin(_TWO_PI * u2))


def _gaussian_rows(n, seed, indices, attempt, bitgen):
    raw = np.empty((len(indices), 2 * n), dtype=np.uint64)
    for row, i in enumerate(indices):
        bitgen.state = _philox_state(seed, i, attempt)
        raw[row] = bitgen.random_raw(2 * n)
    return _box_muller(raw, n)


def coefficient_block(n, seed, start, stop):
    """Rows z_i for i in [start, stop), shape (stop - start, n).

    Row i depends only on (seed, i): Philox keyed by (seed, i), Box-Muller,
    then normalization.  A zero draw (probability 0) is redrawn from the
    next counter block of the same key.
    """
    if n < 1:
        raise DomainError(f"cluster dimension must be >= 1, got {n}")
    bitgen = np.random.Philox(key=0)
    indices = list(range(start, stop))
    z = _gaussian_rows(n, seed, indices, 0, bitgen)
    norm = np.sqrt(np.sum(z.real ** 2 + z.imag ** 2, axis=1))
    attempt = 0
    while np.any(norm == 0):
        attempt += 1
        if attempt >= _MAX_RETRIES:
            raise DegenerateDraw(f"all-zero Gaussian draw for seed={seed}")
        bad = np.nonzero(norm == 0)[0]
        z[bad] = _gaussian_rows(n, seed, [indices[b] for b in bad], attempt, bitgen)
        norm[bad] = np.sqrt(np.sum(z[bad].real ** 2 + z[bad].imag ** 2, axis=1))
    return z / norm[:, None]


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    z: np.ndarray
    seed: int
    sample_index: int

    def __len__(self):
        return int(self.z.size)


@dataclass(frozen=True, eq=False)
class RandomFieldSample:
    coefficients: CoefficientVector
    cluster: object

    def __post_init__(self):
        if len(self.coefficients) != self.cluster.dimension:
            raise DomainError("coefficient vector length does not match the cluster dimension")


def sample_coefficients(n, seed, sample_index):
    z = coefficient_block(n, seed, sample_index, sample_index + 1)[0]
    z.setflags(write=False)
    return CoefficientVector(z, seed, sample_index)


def map_samples(n, seed, count, fn, workers=1, chunk=CHUNK):
    """Concatenate ``fn(Z)`` over sample indices 0..count-1 in index order.

    ``fn`` receives a (rows, n) block and returns an array whose first axis is rows.
    """
    bounds = [(s, min(s + chunk, count)) for s in range(0, count, chunk)]

    def run(b):
        return np.asarray(fn(coefficient_block(n, seed, *b)))

    if workers <= 1 or len(bounds) <= 1:
        parts = [run(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, bounds))
    return np.concatenate(parts) if parts else np.zeros(0)


def period_rv(z, pv):
    """F_1 = |int_S u| = |sum_k z_k b_k|."""
    z = z.z if isinstance(z, CoefficientVector) else np.asarray(z)
    if z.shape[-1] != pv.components.size:
        raise DomainError("coefficient and period vectors differ in length")
    return np.abs(z @ pv.components)


def field_eval(sample, x):
    """u(x) = sum_k z_k phi_k(x)."""
    return complex(evaluate_modes_at_point(sample.cluster, x) @ sample.coefficients.z)


def lq_norm_rv(sample, sub, rule, q):
    """(sum_i w_i |u(s_i)|^q)^{1/q} by direct evaluation at the quadrature nodes."""
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    vals = evaluate_modes(sample.cluster.manifold, sample.cluster.labels, sub.points(rule.nodes))
    u = vals @ sample.coefficients.z
    return float(np.dot(rule.weights, np.abs(u) ** q) ** (1.0 / q))


class RestrictedField:
    """Batched z -> u restricted to the quadrature nodes of a submanifold.

    On a closed rational torus line or a coordinate subtorus with a uniform
    rule, the restriction is a trigonometric polynomial on a uniform grid and
    is evaluated by inverse FFT after binning modes by along-grid frequency.
    Everything else uses the dense mode matrix.
    """

    def __init__(self, cluster, sub, rule):
        self.cluster = cluster
        self.sub = sub
        self.rule = rule
        self._grid = None
        if cluster.manifold.kind == TORUS and rule.kind in ("trapezoid", "tensor-trapezoid"):
            self._grid = self._grid_binning()
        if self._grid is None:
            self._dense = evaluate_modes(cluster.manifold, cluster.labels, sub.points(rule.nodes))

    def _grid_binning(self):
        labels = self.cluster.labels
        vol = self.cluster.manifold.volume
        if isinstance(self.sub, TorusLine) and self.sub.closed:
            m = len(self.rule)
            j = labels @ np.asarray(self.sub.integer_direction, dtype=np.int64)
            phase = np.exp(1j * (labels @ np.asarray(self.sub.base, dtype=float))) / math.sqrt(vol)
            shape = (m,)
            flat = np.mod(j, m)
        elif isinstance(self.sub, TorusSubtorus):
            m = int(round(math.sqrt(len(self.rule))))
            free = list(self.sub.free_axes)
            phase = np.ones(labels.shape[0], dtype=complex) / math.sqrt(vol)
            for ax, val in self.sub.fixed:
                phase = phase * np.exp(1j * labels[:, ax] * val)
            shape = (m, m)
            flat = np.mod(labels[:, free[0]], m) * m + np.mod(labels[:, free[1]], m)
        else:
            return None
        size = int(np.prod(shape))
        binning = sparse.csr_matrix((phase, (flat, np.arange(labels.shape[0]))),
                                    shape=(size, labels.shape[0]))
        counts = np.bincount(flat, minlength=size)
        return shape, binning, counts

    def values(self, Z):
        """u at every node for each row of Z; shape (rows, nodes)."""
        Z = np.atleast_2d(Z)
        if self._grid is None:
            return Z @ self._dense.T
        shape, binning, _ = self._grid
        coeffs = (binning @ Z.T).T.reshape((Z.shape[0],) + shape)
        axes = tuple(range(1, len(shape) + 1))
        u = np.fft.ifftn(coeffs, axes=axes) * np.prod(shape)
        return u.reshape(Z.shape[0], -1)

    def norms(self, Z, q):
        u = self.values(Z)
        return (np.abs(u) ** q @ self.rule.weights) ** (1.0 / q)

    def lipschitz(self, q):
        """A Lipschitz constant of z -> ||u||_{L^q(S)} on the unit sphere.

        q = 2 gives the exact operator norm; q > 2 the bound (int_S |b_s|^q)^{1/q}
        from |u(s)| <= |b_s| |z|.
        """
        if q == 2:
            if self._grid is not None:
                _, _, counts = self._grid
                cell = self.sub.volume / self.cluster.manifold.volume
                return math.sqrt(cell * counts.max())
            a = np.sqrt(self.rule.weights)[:, None] * self._dense
            return float(np.linalg.norm(a, 2))
        if self._grid is not None:
            row_sq = np.full(len(self.rule), self.cluster.dimension / self.cluster.manifold.volume)
        else:
            row_sq = np.sum(np.abs(self._dense) ** 2, axis=1)
        return float(np.dot(self.rule.weights, row_sq ** (q / 2.0)) ** (1.0 / q))
