"""Small statistical toolkit: KS distance, Wilson intervals, order-statistic
median intervals, fsum-based moments and log-log fits."""
import math
from statistics import NormalDist

import numpy as np
from scipy import stats as sps

__all__ = [
    "ks_distance", "ks_threshold", "wilson_interval", "median_with_ci",
    "mean_stderr", "loglog_fit", "exact_mean",
]


def ks_distance(sample, cdf):
    """sup_x |F_n(x) - F(x)| for a continuous model CDF."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_threshold(m, coefficient=1.63):
    """Asymptotic alpha = 0.01 critical value of the one-sample KS statistic."""
    return coefficient / math.sqrt(m)


def wilson_interval(successes, n, confidence=0.99):
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # the endpoints are exact at k = 0 and k = n; rounding would leave ~1e-19
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == n else min(1.0, centre + half)
    return lo, hi


def median_with_ci(sample, confidence=0.99):
    """Sample median and a distribution-free interval from binomial order statistics."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    alpha = 1 - confidence
    lo = int(sps.binom.ppf(alpha / 2, n, 0.5))
    hi = int(sps.binom.isf(alpha / 2, n, 0.5))
    lo = max(lo - 1, 0)
    hi = min(hi, n - 1)
    return float(np.median(x)), float(x[lo]), float(x[hi])


def exact_mean(values):
    values = np.asarray(values, dtype=float)
    return math.fsum(values.tolist()) / values.size


def mean_stderr(values):
    """Mean and standard error from the sample variance; fsum keeps both order-independent."""
    values = np.asarray(values, dtype=float)
    n = values.size
    mean = exact_mean(values)
    if n < 2:
        return mean, 0.0
    var = math.fsum(((values - mean) ** 2).tolist()) / (n - 1)
    return mean, math.sqrt(var / n)


def loglog_fit(x, y, confidence=0.95):
    """Least-squares slope of log y on log x with a t-based confidence interval.

    Returns (slope, intercept, (lo, hi), max_abs_residual).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    n = lx.size
    if n < 3:
        raise ValueError("need at least 3 points for a slope interval")
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    dof = n - 2
    s2 = float(resid @ resid) / dof
    se = math.sqrt(s2 / float(np.sum((lx - lx.mean()) ** 2)))
    t = sps.t.ppf(0.5 + confidence / 2, dof)
    return float(slope), float(intercept), (float(slope - t * se), float(slope + t * se)), \
        float(np.max(np.abs(resid)))
