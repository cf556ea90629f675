"""Closed-form laws of the period and restricted-norm random variables.

Everything is parameterized by the cluster dimension N (complex), i.e. the
coefficient vector z is uniform on the unit sphere of C^N = R^{2N}, and by
NS = |b|^2, the Kuznecov weight.  Projecting onto one complex direction groups
the 2N real coordinates as 2 + (2N - 2), which gives

    P(F_1 > lam) = (1 - lam^2 / NS)^(N - 1),    0 <= lam < sqrt(NS).
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .curves import quadrature
from .errors import DomainError, Unbounded
from .spectral import evaluate_modes
from .special import log_beta, log_gamma

__all__ = [
    "ExactLaw", "DeviationBound", "BoundPair", "survival_exact", "moment_exact", "median_exact",
    "lipschitz_const_period", "deviation_bound", "paper_deviation_bound",
    "concentration_bound_period", "mean_median_gap_bound", "renormalized_bound",
    "bqh_exact", "bqh_limit", "pointwise_norm_profile", "delta_exponent", "restriction_rate",
    "log_gamma", "log_beta",
]


@dataclass(frozen=True)
class ExactLaw:
    n_modes: int
    ns: float

    def __post_init__(self):
        if self.n_modes < 2:
            raise DomainError(f"laws need N_h >= 2, got {self.n_modes}")
        if self.ns < 0:
            raise DomainError(f"N(S)_h must be nonnegative, got {self.ns}")

    def scaled(self, ns):
        return ExactLaw(self.n_modes, ns)


@dataclass(frozen=True)
class DeviationBound:
    """P(|X - median| > r) <= prefactor * exp(-rate * r^2)."""

    rate: float
    prefactor: float

    def __post_init__(self):
        if not (self.rate > 0 and self.prefactor > 0):
            raise DomainError("deviation bound needs positive rate and prefactor")

    def __call__(self, r):
        return self.prefactor * np.exp(-self.rate * np.square(r))


class BoundPair(NamedTuple):
    derived: float
    paper: float


def survival_exact(lam, law):
    """P(F_1 > lam); vectorized over ``lam``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise DomainError("lambda must be nonnegative")
    if law.ns == 0:
        out = np.where(lam > 0, 0.0, 1.0)
    else:
        t = np.clip(1.0 - lam * lam / law.ns, 0.0, 1.0)
        out = np.where(lam * lam < law.ns, t ** (law.n_modes - 1), 0.0)
    return float(out) if out.ndim == 0 else out


def moment_exact(p, law):
    """A_{p,h} = E[F_1^p] = (p/2) NS^{p/2} B(p/2, N).

    The factor 1/2 comes from int_0^1 eta^{p-1} (1 - eta^2)^{N-1} d eta = B(p/2, N)/2.
    p = 0 returns 1.
    """
    if p == 0:
        return 1.0
    if p < 0:
        raise DomainError(f"moment order must be nonnegative, got {p}")
    if law.ns == 0:
        return 0.0
    return math.exp(math.log(p / 2.0) + 0.5 * p * math.log(law.ns) + log_beta(p / 2.0, law.n_modes))


def median_exact(law):
    """sqrt(NS (1 - 2^{-1/(N-1)})), the unique root of survival = 1/2."""
    if law.ns == 0:
        return 0.0
    # 1 - 2^{-x} = -expm1(-x log 2), accurate for large N
    return math.sqrt(law.ns * -math.expm1(-math.log(2.0) / (law.n_modes - 1)))


def lipschitz_const_period(p, ns):
    """Lipschitz constant p NS^{p/2} of u -> |int_S u|^p on the unit sphere of the cluster."""
    return p * ns ** (p / 2.0)


def deviation_bound(p, law):
    """Concentration of F_p = F_1^p around its median.

    Levy's inequality on the real sphere S^{2N-1} with Lipschitz constant L = p NS^{p/2}:
    P(|F_p - M| > r) <= 2 exp(-(2N - 2) r^2 / (2 L^2)).
    """
    L = lipschitz_const_period(p, law.ns)
    return DeviationBound((2 * law.n_modes - 2) / (2.0 * L * L), 2.0)


def paper_deviation_bound(p, law):
    """The variant 2 exp(-(N - 2) r^2 / (p NS^p)) as stated with complex dimension N."""
    if law.n_modes <= 2:
        raise Unbounded("the N - 2 form is vacuous for N_h = 2")
    return DeviationBound((law.n_modes - 2) / (p * law.ns ** p), 2.0)


def concentration_bound_period(r, p, law):
    if not r > 0:
        raise DomainError("r must be positive")
    derived = float(deviation_bound(p, law)(r))
    try:
        paper = float(paper_deviation_bound(p, law)(r))
    except Unbounded:
        paper = 2.0
    return BoundPair(derived, paper)


def mean_median_gap_bound(p, law):
    """(pi/2) (2 NS^p / (N - 2))^{1/2}, with the N - 2 of the displayed estimate."""
    if law.n_modes == 2:
        raise Unbounded("mean-median gap bound divides by N_h - 2 = 0")
    return 0.5 * math.pi * math.sqrt(2.0 * law.ns ** p / (law.n_modes - 2))


def renormalized_bound(r, p, law):
    """Bound for F_p / (p NS^{p/2}), whose Lipschitz constant is 1: 2 exp(-(N - 1) r^2)."""
    if not r > 0:
        raise DomainError("r must be positive")
    return 2.0 * math.exp(-(law.n_modes - 1) * r * r)


def pointwise_norm_profile(cluster, sub):
    """Callable s -> |b_{s,h}| along ``sub`` (parameter values in, moduli out)."""
    def profile(s):
        vals = evaluate_modes(cluster.manifold, cluster.labels, sub.points(s))
        return np.sqrt(np.sum(np.abs(vals) ** 2, axis=1))
    return profile


def bqh_exact(q, cluster, sub, profile=None):
    """B_{q,h} = (E ||u||_{L^q(S)}^q)^{1/q} = [q (int_S |b_s|^q) B(q/2, N) / 2]^{1/q}.

    ``profile`` maps parameter values along ``sub`` to |b_{s,h}|; the integral
    is then done with the cluster's quadrature rule.  Without it the pointwise
    Weyl identity |b_s|^2 = N / Vol(M), exact on flat tori and on S^2 (addition
    theorem), gives int_S |b_s|^q = Vol(S) (N / Vol(M))^{q/2}.
    """
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    n = cluster.dimension
    if profile is not None:
        rule = quadrature(sub, cluster.max_frequency)
        log_int = math.log(float(np.dot(rule.weights, np.asarray(profile(rule.nodes)) ** q)))
    else:
        log_int = math.log(sub.volume) + 0.5 * q * (math.log(n) - math.log(cluster.manifold.volume))
    log_bq = math.log(q) + log_int - math.log(2.0) + log_beta(q / 2.0, n)
    return math.exp(log_bq / q)


def bqh_limit(q, length, volume):
    """lim_{h -> 0} B_{q,h} = (Gamma(q/2 + 1) length / volume^{q/2})^{1/q}."""
    return math.exp((log_gamma(q / 2.0 + 1.0) + math.log(length) - 0.5 * q * math.log(volume)) / q)


def delta_exponent(q):
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    return 0.5 - 1.0 / q if q >= 4 else 0.25


def restriction_rate(q, h):
    """G(h): h^{-2/q} for q >= 4, h^{-1/2} for 2 <= q <= 4."""
    if q < 2:
        raise DomainError(f"q must be >= 2, got {q}")
    return h ** (-2.0 / q) if q >= 4 else h ** -0.5
