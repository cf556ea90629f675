"""Monte Carlo experiments, scaling sweeps and the deterministic examples.

Every ``run_*`` function is a pure function of its config: samples come from
per-index Philox streams, batches have a fixed size, and all reductions go
through ``math.fsum`` or order statistics, so the worker count never changes a
single output bit.  Each result exposes ``table()`` -> (header, rows) for CSV
export and ``passed`` for the statistical assertion it carries.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import exactstats as ex
from .curves import SphereGreatArc, SphereLatitudeCircle, build_submanifold, quadrature
from .ensemble import RestrictedField, map_samples
from .errors import DomainError, PoorFit
from .harmonics import normalized_legendre
from .periods import closed_form_periods, kuznecov_cumulative, kuznecov_weight, period_vector
from .spectral import Manifold, SpectralWindow, count_cluster, enumerate_cluster
from .stats import ks_distance, ks_threshold, loglog_fit, mean_stderr, median_with_ci, wilson_interval

__all__ = [
    "ExperimentConfig", "MomentReport", "TailReport", "ScalingReport",
    "run_moments", "run_tail", "run_concentration", "run_scaling_sweep", "run_lq_medians",
    "run_deterministic_examples", "period_samples", "lq_samples", "period_lipschitz_check",
]

Z_MAX = 3.0
RATE_TOL = 0.2
SWEEP_TOL = 0.15
MIN_TAIL_COUNT = 10


@dataclass(frozen=True)
class ExperimentConfig:
    manifold: Manifold
    window: SpectralWindow
    h: tuple
    submanifold: object
    p: tuple = (1, 2, 3)
    q: tuple = (2, 4, 6)
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    r_points: int = 20
    lambda_points: int = 50
    sweep_mc_samples: int = 0

    def __post_init__(self):
        if self.samples < 100:
            raise DomainError(f"sample count must be >= 100, got {self.samples}")
        if not self.h:
            raise DomainError("h list is empty")
        if any(b >= a for a, b in zip(self.h, self.h[1:])):
            raise DomainError(f"h list must be strictly decreasing, got {self.h}")
        if self.submanifold.ambient != self.manifold:
            raise DomainError("submanifold does not live in the configured manifold")


def _law(n_modes, ns):
    return ex.ExactLaw(n_modes, ns)


def period_samples(cluster, pv, samples, seed, workers=1):
    """F_1 for sample indices 0..samples-1."""
    b = pv.components
    return map_samples(cluster.dimension, seed, samples, lambda Z: np.abs(Z @ b), workers)


def lq_samples(cluster, sub, qs, samples, seed, workers=1):
    """{q: ||u||_{L^q(S)} per sample} from one pass over the samples."""
    rule = quadrature(sub, cluster.max_frequency)
    op = RestrictedField(cluster, sub, rule)
    qs = list(qs)

    def stat(Z):
        mod = np.abs(op.values(Z))
        return np.stack([(mod ** q @ rule.weights) ** (1.0 / q) for q in qs], axis=1)

    out = map_samples(cluster.dimension, seed, samples, stat, workers)
    return {q: out[:, j] for j, q in enumerate(qs)}, op


# ---------------------------------------------------------------- moments

@dataclass(frozen=True)
class MomentReport:
    h: float
    p: int
    exact: float
    mc_mean: float
    mc_stderr: float
    sample_count: int
    z_score: float

    @property
    def passed(self):
        return abs(self.z_score) <= Z_MAX


@dataclass
class MomentsResult:
    reports: list

    name = "moments"

    @property
    def passed(self):
        return all(r.passed for r in self.reports)

    def table(self):
        return (["h", "p", "exact", "mc_mean", "mc_stderr", "z"],
                [(r.h, r.p, r.exact, r.mc_mean, r.mc_stderr, r.z_score) for r in self.reports])


def moment_report(h, p, law, F):
    exact = ex.moment_exact(p, law)
    if p == 0:
        return MomentReport(h, 0, 1.0, 1.0, 0.0, F.size, 0.0)
    mean, se = mean_stderr(F ** p)
    z = (mean - exact) / se if se > 0 else 0.0
    return MomentReport(h, p, exact, mean, se, F.size, z)


def run_moments(config):
    reports = []
    for h in config.h:
        cluster = enumerate_cluster(config.manifold, config.window, h)
        pv = period_vector(cluster, config.submanifold)
        law = _law(cluster.dimension, pv.squared_norm)
        F = period_samples(cluster, pv, config.samples, config.seed, config.workers)
        reports.extend(moment_report(h, p, law, F) for p in config.p)
    return MomentsResult(reports)


# ---------------------------------------------------------------- tail law

@dataclass
class TailReport:
    h: float
    n_modes: int
    ns: float
    lambdas: np.ndarray
    empirical: np.ndarray
    exact: np.ndarray
    ks_distance: float
    ks_threshold: float

    @property
    def passed(self):
        return self.ks_distance <= self.ks_threshold


@dataclass
class TailResult:
    reports: list

    name = "tail"

    @property
    def passed(self):
        return all(r.passed for r in self.reports)

    def table(self):
        rows = []
        for r in self.reports:
            rows.extend((r.h, float(l), float(e), float(x))
                        for l, e, x in zip(r.lambdas, r.empirical, r.exact))
        return ["h", "lambda", "empirical_survival", "exact_survival"], rows

    def summary_table(self):
        return (["h", "n_modes", "ns", "ks_distance", "ks_threshold", "passed"],
                [(r.h, r.n_modes, r.ns, r.ks_distance, r.ks_threshold, int(r.passed))
                 for r in self.reports])


def tail_report(h, law, F, lambda_points=50, model_law=None):
    """KS comparison of F against the survival law of ``model_law`` (defaults to ``law``)."""
    model = model_law or law
    lam = np.linspace(0.0, math.sqrt(law.ns), lambda_points)
    x = np.sort(F)
    emp = 1.0 - np.searchsorted(x, lam, side="right") / x.size
    exact = ex.survival_exact(lam, model)
    d = ks_distance(F, lambda v: 1.0 - ex.survival_exact(v, model))
    return TailReport(h, law.n_modes, law.ns, lam, emp, exact, d, ks_threshold(F.size))


def run_tail(config, ns_scale=1.0):
    """``ns_scale != 1`` compares against a deliberately wrong law (negative control)."""
    reports = []
    for h in config.h:
        cluster = enumerate_cluster(config.manifold, config.window, h)
        pv = period_vector(cluster, config.submanifold)
        law = _law(cluster.dimension, pv.squared_norm)
        F = period_samples(cluster, pv, config.samples, config.seed, config.workers)
        reports.append(tail_report(h, law, F, config.lambda_points, law.scaled(law.ns * ns_scale)))
    return TailResult(reports)


# ---------------------------------------------------------------- concentration

@dataclass
class ExceedanceCurve:
    h: float
    statistic: str
    q: float
    n_modes: int
    lipschitz: float
    median: float
    r: np.ndarray
    empirical: np.ndarray
    wilson_lo: np.ndarray
    bound: np.ndarray
    certified_rate: float
    empirical_rate: float

    @property
    def passed(self):
        return bool(np.all(self.wilson_lo <= self.bound))


def exceedance_curve(h, statistic, q, X, n_modes, lipschitz, r_grid):
    med = float(np.median(X))
    dev = np.abs(X - med)
    m = X.size
    counts = np.array([np.count_nonzero(dev > r) for r in r_grid])
    emp = counts / m
    lo = np.array([wilson_interval(int(k), m)[0] for k in counts])
    rate = (2 * n_modes - 2) / (2.0 * lipschitz ** 2)
    bound = 2.0 * np.exp(-rate * r_grid ** 2)
    usable = (counts >= MIN_TAIL_COUNT) & (counts < m)
    emp_rate = float(np.min(-np.log(emp[usable] / 2.0) / r_grid[usable] ** 2)) if usable.any() else math.nan
    return ExceedanceCurve(h, statistic, q, n_modes, lipschitz, med, r_grid, emp, lo, bound, rate, emp_rate)


@dataclass
class RateFit:
    q: float
    expected_slope: float
    certified_slope: float
    empirical_slope: float

    @property
    def passed(self):
        # certified rate must track G(h); the observed rate may only be steeper
        return (abs(self.certified_slope - self.expected_slope) <= RATE_TOL
                and self.empirical_slope <= self.expected_slope + RATE_TOL)


@dataclass
class ConcentrationResult:
    curves: list
    gaps: list       # (h, A_1, mc median, gap bound, exact median, ci_lo, ci_hi)
    rate_fits: list

    name = "concentration"

    @property
    def passed(self):
        gaps_ok = all(abs(a - med) <= bound and lo <= exact_med <= hi
                      for _, a, med, bound, exact_med, lo, hi in self.gaps)
        return all(c.passed for c in self.curves) and gaps_ok and all(f.passed for f in self.rate_fits)

    def table(self):
        rows = []
        for c in self.curves:
            rows.extend((c.h, c.statistic, c.q, float(r), float(e), float(lo), float(b), int(lo <= b))
                        for r, e, lo, b in zip(c.r, c.empirical, c.wilson_lo, c.bound))
        return ["h", "statistic", "q", "r", "empirical", "wilson_lo", "bound", "ok"], rows

    def gap_table(self):
        return (["h", "a1_exact", "mc_median", "gap_bound", "median_exact", "median_ci_lo", "median_ci_hi"],
                [tuple(g) for g in self.gaps])

    def rate_table(self):
        head = ["q", "h", "n_modes", "lipschitz", "certified_rate", "empirical_rate", "G_h"]
        rows = [(c.q, c.h, c.n_modes, c.lipschitz, c.certified_rate, c.empirical_rate,
                 ex.restriction_rate(c.q, c.h)) for c in self.curves if c.statistic == "lq"]
        return head, rows

    def fit_table(self):
        return (["q", "expected_slope", "certified_slope", "empirical_slope", "passed"],
                [(f.q, f.expected_slope, f.certified_slope, f.empirical_slope, int(f.passed))
                 for f in self.rate_fits])


def _rate_exponent(q):
    return -2.0 / q if q >= 4 else -0.5


def run_concentration(config, lq_samples_count=None, rate_qs=(2,)):
    """Exceedance of |X - median| against the Levy bound, X = F_1 and X = ||u||_q.

    ``rate_qs`` lists the q whose certified-rate slope is fitted against G(h);
    only q = 2 has an exact Lipschitz constant (larger q use a sup bound that
    does not track G).
    """
    curves, gaps = [], []
    m_lq = lq_samples_count or config.samples
    for h in config.h:
        cluster = enumerate_cluster(config.manifold, config.window, h)
        pv = period_vector(cluster, config.submanifold)
        law = _law(cluster.dimension, pv.squared_norm)
        F = period_samples(cluster, pv, config.samples, config.seed, config.workers)
        r_grid = np.linspace(1.0, config.r_points, config.r_points) * math.sqrt(law.ns) / config.r_points
        curves.append(exceedance_curve(h, "F1", 1, F, law.n_modes,
                                       ex.lipschitz_const_period(1, law.ns), r_grid))
        med, lo, hi = median_with_ci(F)
        gaps.append((h, ex.moment_exact(1, law), med, ex.mean_median_gap_bound(1, law),
                     ex.median_exact(law), lo, hi))
        if not config.q:
            continue
        norms, op = lq_samples(cluster, config.submanifold, config.q, m_lq, config.seed + 1, config.workers)
        for q in config.q:
            X = norms[q]
            dmax = float(np.max(np.abs(X - np.median(X))))
            grid = np.linspace(1.0, config.r_points, config.r_points) * dmax / config.r_points
            curves.append(exceedance_curve(h, "lq", q, X, cluster.dimension, op.lipschitz(q), grid))
    fits = []
    if len(config.h) >= 3:
        for q in rate_qs:
            sel = [c for c in curves if c.statistic == "lq" and c.q == q]
            if len(sel) < 3:
                continue
            hs = [c.h for c in sel]
            cert = loglog_fit(hs, [c.certified_rate for c in sel])[0]
            finite = [(c.h, c.empirical_rate) for c in sel if math.isfinite(c.empirical_rate)]
            emp = loglog_fit(*zip(*finite))[0] if len(finite) >= 3 else math.nan
            fits.append(RateFit(q, _rate_exponent(q), cert, emp))
    return ConcentrationResult(curves, gaps, fits)


def period_lipschitz_check(pv, p, pairs=1000, seed=0):
    """Count pairs violating ||b.u|^p - |b.v|^p| <= p NS^{p/2} |u - v|.

    Pairs mix independent draws, small perturbations and draws pushed toward
    the extremal direction b / |b|, where the bound is closest to tight.
    Returns (violations, max ratio lhs / rhs).
    """
    n = pv.components.size
    rng = np.random.default_rng([seed, p])
    U = map_samples(n, seed, pairs, lambda Z: Z)
    V = map_samples(n, seed + 1, pairs, lambda Z: Z)
    third = pairs // 3
    eps = 10.0 ** rng.uniform(-8, -1, size=(third, 1))
    V[:third] = U[:third] + eps * V[:third]
    e = np.conj(pv.components) / pv.norm
    w = rng.uniform(0.5, 1.0, size=(third, 1))
    U[third:2 * third] = w * e + (1 - w) * U[third:2 * third]
    V[:2 * third] /= np.linalg.norm(V[:2 * third], axis=1, keepdims=True)
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    lhs = np.abs(np.abs(U @ pv.components) ** p - np.abs(V @ pv.components) ** p)
    rhs = ex.lipschitz_const_period(p, pv.squared_norm) * np.linalg.norm(U - V, axis=1)
    ratio = lhs / rhs
    return int(np.count_nonzero(lhs > rhs * (1 + 1e-12))), float(ratio.max())


# ---------------------------------------------------------------- scaling sweep

@dataclass
class ScalingReport:
    h: list
    n_modes: list
    ns: list
    values: list
    mc_medians: list
    expected_slope: float
    slope: float
    slope_ci: tuple
    max_residual: float
    bracket: tuple

    name = "sweep"

    @property
    def passed(self):
        lo, hi = self.slope_ci
        return lo - SWEEP_TOL <= self.expected_slope <= hi + SWEEP_TOL

    def table(self):
        head = ["row", "h", "n_modes", "ns", "a1_exact", "mc_median", "slope", "slope_lo", "slope_hi",
                "expected", "bracket_lo", "bracket_hi"]
        rows = [("point", h, n, s, v, m, "", "", "", "", "", "")
                for h, n, s, v, m in zip(self.h, self.n_modes, self.ns, self.values, self.mc_medians)]
        rows.append(("fit", "", "", "", "", "", self.slope, self.slope_ci[0], self.slope_ci[1],
                     self.expected_slope, self.bracket[0], self.bracket[1]))
        return head, rows


def run_scaling_sweep(config, strict=False):
    """Exact A_{1,h} over the h list and its log-log slope against d/2.

    N_h is counted without enumerating modes and N(S)_h summed over the
    sublattice carrying nonzero periods, so T^3 at h = 1/320 (~8e6 modes) is cheap.
    """
    if len(config.h) < 4:
        raise DomainError("a scaling sweep needs at least 4 values of h")
    d = config.submanifold.dim
    ns_list, n_list, vals, meds = [], [], [], []
    for h in config.h:
        n = count_cluster(config.manifold, config.window, h)
        ns = kuznecov_weight(config.manifold, config.window, h, config.submanifold)
        law = _law(n, ns)
        n_list.append(n)
        ns_list.append(ns)
        vals.append(ex.moment_exact(1, law))
        med = math.nan
        if config.sweep_mc_samples and n <= 50_000:
            cluster = enumerate_cluster(config.manifold, config.window, h)
            pv = period_vector(cluster, config.submanifold)
            med = median_with_ci(period_samples(cluster, pv, config.sweep_mc_samples,
                                                config.seed, config.workers))[0]
        meds.append(med)
    if min(vals) <= 0:
        raise PoorFit("A_{1,h} vanishes at some h (no mode in the window has a nonzero period)")
    slope, _, ci, resid = loglog_fit(config.h, vals)
    ratios = [v / h ** (d / 2.0) for v, h in zip(vals, config.h)]
    rep = ScalingReport(list(config.h), n_list, ns_list, vals, meds, d / 2.0, slope, ci, resid,
                        (min(ratios), max(ratios)))
    if strict and not rep.passed:
        raise PoorFit(f"slope {slope:.3f} CI {ci} excludes {d / 2} by more than {SWEEP_TOL}")
    return rep


# ---------------------------------------------------------------- restricted L^q medians

@dataclass
class LqRow:
    h: float
    q: float
    n_modes: int
    bqh: float
    limit: float
    mc_moment: float
    mc_stderr: float
    z_score: float
    median: float
    ci_lo: float
    ci_hi: float

    @property
    def upper(self):
        return 2.0 ** (1.0 / self.q) * self.bqh

    @property
    def lower(self):
        return 0.5 * self.limit

    @property
    def passed(self):
        return abs(self.z_score) <= Z_MAX and self.ci_lo <= self.upper and self.median >= self.lower


@dataclass
class LqResult:
    rows: list

    name = "lq"

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def table(self):
        head = ["h", "q", "n_modes", "bqh", "limit", "mc_moment", "mc_stderr", "z", "median",
                "median_ci_lo", "median_ci_hi", "upper", "lower"]
        return head, [(r.h, r.q, r.n_modes, r.bqh, r.limit, r.mc_moment, r.mc_stderr, r.z_score,
                       r.median, r.ci_lo, r.ci_hi, r.upper, r.lower) for r in self.rows]


def lq_rows(cluster, sub, qs, samples, seed, workers=1):
    norms, _ = lq_samples(cluster, sub, qs, samples, seed, workers)
    rows = []
    for q in qs:
        X = norms[q]
        bqh = ex.bqh_exact(q, cluster, sub)
        mean, se = mean_stderr(X ** q)
        z = (mean - bqh ** q) / se if se > 0 else 0.0
        med, lo, hi = median_with_ci(X)
        rows.append(LqRow(cluster.h, q, cluster.dimension, bqh,
                          ex.bqh_limit(q, sub.volume, cluster.manifold.volume),
                          mean, se, z, med, lo, hi))
    return rows


def run_lq_medians(config):
    rows = []
    for h in config.h:
        cluster = enumerate_cluster(config.manifold, config.window, h)
        rows.extend(lq_rows(cluster, config.submanifold, config.q, config.samples,
                            config.seed, config.workers))
    return LqResult(rows)


# ---------------------------------------------------------------- deterministic examples

@dataclass
class DeterministicResult:
    rows: list = field(default_factory=list)   # (example, parameter, value, target, ok)
    fits: dict = field(default_factory=dict)

    name = "det_examples"

    @property
    def passed(self):
        return all(r[4] for r in self.rows)

    def table(self):
        return ["example", "parameter", "value", "target", "ok"], [
            (e, p, v, t, int(ok)) for e, p, v, t, ok in self.rows]


def _zonal_periods(sub, degrees):
    """|int_sub Y_l0| for each degree, one quadrature rule at the top frequency."""
    lmax = int(max(degrees))
    rule = quadrature(sub, math.sqrt(lmax * (lmax + 1)))
    theta = sub.points(rule.nodes)[:, 0]
    lam = normalized_legendre(0, lmax, theta)
    return lam[np.asarray(degrees)] @ rule.weights


def run_deterministic_examples(arc_length=1.0, lmax=400, segment_length=1.0, n_max=50, h_min=1 / 500):
    res = DeterministicResult()

    # zonal harmonic on a meridian arc centred on the pole: |period| ~ h^{1/2}
    arc = SphereGreatArc((0.0, 0.0, 1.0), (1.0, 0.0, 0.0), arc_length, -0.5 * arc_length)
    degrees = np.unique(np.geomspace(10, lmax, 30).astype(int))
    per = np.abs(_zonal_periods(arc, degrees))
    hs = 1.0 / np.sqrt(degrees * (degrees + 1.0))
    slope, _, ci, _ = loglog_fit(hs, per)
    res.fits["meridian_slope"] = (slope, ci)
    for l, v in zip(degrees, per):
        res.rows.append(("meridian_zonal_period", int(l), float(v), "", True))
    res.rows.append(("meridian_slope", f"l=10..{lmax}", slope, 0.5, abs(slope - 0.5) <= 0.15))

    # zonal harmonic on the equator: -> 2 for even l, 0 for odd l
    equator = SphereLatitudeCircle(0.5 * math.pi)
    degrees = np.arange(100, lmax + 1)
    per = _zonal_periods(equator, degrees)
    for l, v in zip(degrees, per):
        if l % 2:
            res.rows.append(("equator_zonal_odd", int(l), float(v), 0.0, abs(v) <= 1e-10))
        else:
            res.rows.append(("equator_zonal_even", int(l), float(abs(v)), 2.0, abs(abs(v) - 2.0) <= 0.1))

    # e^{i n x_2} on a vertical segment: |e^{inL} - 1| / n <= 2/n
    torus = Manifold.torus(2)
    seg = build_submanifold("torus_line", base=[0.0, 0.0], direction=[0, 1], length=segment_length)
    ns = np.arange(1, n_max + 1)
    labels = np.stack([np.zeros_like(ns), ns], axis=1)
    vals = np.abs(closed_form_periods(torus, labels, seg)) * math.sqrt(torus.volume)
    for n, v in zip(ns, vals):
        exact = abs(np.exp(1j * n * segment_length) - 1.0) / n
        res.rows.append(("torus_segment", int(n), float(v), 2.0 / n,
                         v <= 2.0 / n and abs(v - exact) <= 1e-12))

    # cumulative Kuznecov sum on T^2 along x_2 = 0: h E(h) -> 2
    gamma = build_submanifold("torus_line", base=[0.0, 0.0], direction=[1, 0], closed=True)
    data = kuznecov_cumulative(torus, gamma, h_min)
    for h, E in data:
        res.rows.append(("kuznecov_hE", h, h * E, 2.0, True))
    h_last, e_last = data[-1]
    res.rows.append(("kuznecov_hE_limit", h_last, h_last * e_last, 2.0, abs(h_last * e_last - 2.0) <= 0.04))
    return res
