"""Orthonormal complex spherical harmonics on S^2.

Uses the fully normalized associated Legendre functions

    lam(l, m)(theta) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(cos theta)

with the Condon-Shortley phase, computed by the standard three-term
recurrence in l at fixed m (stable for l in the thousands).  Then
Y_lm = lam(l, m) e^{i m phi} and Y_{l,-m} = (-1)^m conj(Y_lm).
"""
import numpy as np

__all__ = ["normalized_legendre", "sph_harm", "sph_harm_matrix", "zonal"]

_INV_SQRT_4PI = 1.0 / np.sqrt(4.0 * np.pi)


def _sectoral(m, cos_t, sin_t):
    """lam(m, m) including the (-1)^m phase."""
    val = np.full_like(cos_t, _INV_SQRT_4PI)
    for k in range(1, m + 1):
        val = -np.sqrt((2.0 * k + 1.0) / (2.0 * k)) * sin_t * val
    return val


def normalized_legendre(m, lmax, theta):
    """Rows lam(l, m)(theta) for l = m..lmax; shape (lmax - m + 1, len(theta))."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    out = np.zeros((lmax - m + 1,) + theta.shape)
    if lmax < m:
        return out
    out[0] = _sectoral(m, cos_t, sin_t)
    if lmax == m:
        return out
    out[1] = np.sqrt(2.0 * m + 3.0) * cos_t * out[0]
    for l in range(m + 2, lmax + 1):
        a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
        b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
        out[l - m] = a * (cos_t * out[l - m - 1] - b * out[l - m - 2])
    return out


def sph_harm_matrix(degrees, orders, theta, phi):
    """Matrix Y[i, j] = Y_{degrees[j], orders[j]}(theta[i], phi[i]).

    ``degrees``/``orders`` are integer arrays of equal length with |m| <= l.
    Work is O(lmax^2 * points), one recurrence per distinct |m|.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    orders = np.asarray(orders, dtype=np.int64)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if np.any(np.abs(orders) > degrees):
        raise ValueError("need |m| <= l for every (l, m)")
    out = np.empty((theta.size, degrees.size), dtype=complex)
    if degrees.size == 0:
        return out
    abs_m = np.abs(orders)
    for m in np.unique(abs_m):
        cols = np.nonzero(abs_m == m)[0]
        lmax = int(degrees[cols].max())
        lam = normalized_legendre(int(m), lmax, theta)
        phase = np.exp(1j * m * phi)
        for j in cols:
            val = lam[degrees[j] - m] * phase
            if orders[j] < 0:
                val = (-1) ** int(m) * np.conj(val)
            out[:, j] = val
    return out


def sph_harm(l, m, theta, phi):
    return sph_harm_matrix([l], [m], theta, phi)[:, 0]


def zonal(l, theta):
    """L^2-normalized zonal harmonic Y_l0 (real)."""
    return normalized_legendre(0, l, theta)[l]
