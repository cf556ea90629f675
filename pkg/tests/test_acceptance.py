"""The ten acceptance criteria, each at its stated tolerance.

A pass/fail line per criterion is printed in the pytest terminal summary.
Seeds are fixed here and were chosen before the runs.
"""
import math
import time

import mpmath
import numpy as np
import pytest

from randperiods.cli import run
from randperiods.curves import build_submanifold
from randperiods.experiments import (ExperimentConfig, period_lipschitz_check, run_concentration,
                                     run_deterministic_examples, run_lq_medians, run_moments,
                                     run_scaling_sweep, run_tail)
from randperiods.periods import closed_form_periods, kuznecov_cumulative, kuznecov_weight, \
    period_vector, quadrature_periods
from randperiods.special import log_beta, log_gamma
from randperiods.spectral import Manifold, SpectralWindow, count_cluster, enumerate_cluster

SEED = 7
M = 100_000
T2 = Manifold.torus(2)
T3 = Manifold.torus(3)
WINDOW = SpectralWindow(1.0, 6.0)
GAMMA = build_submanifold("torus_line", base=[0.0, 0.0], direction=[1, 0], closed=True)
SUBTORUS = build_submanifold("torus_subtorus", fixed=[[2, 0.0]], ambient_dim=3)
SWEEP_H = tuple(1.0 / k for k in (20, 40, 80, 160, 320))

pytestmark = pytest.mark.acceptance


def standard_config(**kw):
    base = dict(manifold=T2, window=WINDOW, h=(0.1,), submanifold=GAMMA, samples=M, seed=SEED)
    base.update(kw)
    return ExperimentConfig(**base)


def test_c01_cdf_law(report_criterion):
    t0 = time.perf_counter()
    cfg = standard_config()
    good = run_tail(cfg).reports[0]
    bad = run_tail(cfg, ns_scale=2.0).reports[0]
    secs = time.perf_counter() - t0
    ok = good.passed and not bad.passed and secs <= 30
    report_criterion(1, ok, f"KS {good.ks_distance:.5f} <= {good.ks_threshold:.5f}; "
                            f"corrupted NS gives KS {bad.ks_distance:.4f}; {secs:.1f}s")
    assert good.ks_threshold == pytest.approx(1.63 / math.sqrt(M))
    assert good.passed
    assert not bad.passed
    assert secs <= 30


def test_c02_exact_moments(report_criterion):
    t0 = time.perf_counter()
    reports = run_moments(standard_config(p=(1, 2, 3))).reports
    secs = time.perf_counter() - t0
    c = enumerate_cluster(T2, WINDOW, 0.1)
    ns = period_vector(c, GAMMA).squared_norm
    r2 = next(r for r in reports if r.p == 2)
    sym_z = (r2.mc_mean - ns / c.dimension) / r2.mc_stderr
    ok = all(r.passed for r in reports) and abs(sym_z) <= 3 and secs <= 60
    zs = ", ".join(f"p={r.p} z={r.z_score:+.2f}" for r in reports)
    report_criterion(2, ok, f"{zs}; p=2 vs NS/N z={sym_z:+.2f}; {secs:.1f}s")
    assert r2.exact == pytest.approx(ns / c.dimension, rel=1e-14)
    assert ok


def test_c03_main_scaling(report_criterion):
    t0 = time.perf_counter()
    curve = run_scaling_sweep(standard_config(h=SWEEP_H, samples=100))
    surface = run_scaling_sweep(standard_config(manifold=T3, h=SWEEP_H, submanifold=SUBTORUS, samples=100))
    secs = time.perf_counter() - t0
    ok = abs(curve.slope - 0.5) <= 0.10 and abs(surface.slope - 1.0) <= 0.15 and secs <= 60
    report_criterion(3, ok, f"T2 curve slope {curve.slope:.4f} (0.5 +- 0.10); "
                            f"T3 subtorus slope {surface.slope:.4f} (1.0 +- 0.15); {secs:.1f}s")
    assert ok


def test_c04_counting(report_criterion):
    t0 = time.perf_counter()
    inv = list(range(50, 501)) + [123.4, 250.75, 499.5]
    worst = 0.0
    ns_mismatch = 0
    for k in inv:
        h = 1.0 / k
        n = count_cluster(T2, WINDOW, h)
        worst = max(worst, abs(n / (2 * math.pi * WINDOW.D * k) - 1.0))
        ints = math.floor(k + WINDOW.D) - math.floor(k)
        ns = kuznecov_weight(T2, WINDOW, h, GAMMA)
        if ns != 2 * ints:
            ns_mismatch += 1
    # full cluster route on a subset
    for k in range(50, 501, 50):
        c = enumerate_cluster(T2, WINDOW, 1.0 / k)
        if period_vector(c, GAMMA).squared_norm != 2 * WINDOW.D:
            ns_mismatch += 1
    h_last, e_last = kuznecov_cumulative(T2, GAMMA, 1.0 / 500)[-1]
    he = h_last * e_last
    secs = time.perf_counter() - t0
    ok = worst <= 0.20 and ns_mismatch == 0 and abs(he / 2 - 1) <= 0.02 and secs <= 10
    report_criterion(4, ok, f"max |N_h / (2 pi D / h) - 1| = {worst:.4f}; N(gamma) mismatches {ns_mismatch}; "
                            f"h E(h) = {he:.5f} at h = 1/500; {secs:.1f}s")
    assert ok


def test_c05_concentration(report_criterion):
    t0 = time.perf_counter()
    res = run_concentration(standard_config(q=()))
    secs = time.perf_counter() - t0
    curve = res.curves[0]
    violations = int(np.count_nonzero(curve.wilson_lo > curve.bound))
    h, a1, med, gap, med_exact, lo, hi = res.gaps[0]
    ok = violations == 0 and abs(a1 - med) <= gap and lo <= med_exact <= hi and secs <= 60
    report_criterion(5, ok, f"{violations} violations on {curve.r.size}-point grid; "
                            f"|A1 - median| = {abs(a1 - med):.4f} <= {gap:.4f}; "
                            f"median_exact {med_exact:.5f} in [{lo:.5f}, {hi:.5f}]; {secs:.1f}s")
    assert curve.r.size == 20
    assert ok


def test_c06_lipschitz(report_criterion):
    t0 = time.perf_counter()
    pv = period_vector(enumerate_cluster(T2, WINDOW, 0.1), GAMMA)
    results = {p: period_lipschitz_check(pv, p, pairs=1000, seed=SEED) for p in (1, 2, 3)}
    secs = time.perf_counter() - t0
    total = sum(v for v, _ in results.values())
    ok = total == 0 and secs <= 10
    ratios = ", ".join(f"p={p} max ratio {r:.3f}" for p, (_, r) in results.items())
    report_criterion(6, ok, f"{total} violations over 3 x 1000 pairs; {ratios}; {secs:.1f}s")
    assert ok


def test_c07_restricted_lq(report_criterion):
    t0 = time.perf_counter()
    hs = (1 / 20, 1 / 80, 1 / 320)
    lq = run_lq_medians(standard_config(h=hs, q=(2, 4, 6), samples=2000, seed=SEED + 1))
    conc = run_concentration(standard_config(h=hs, q=(2,), samples=2000, seed=SEED + 2))
    secs = time.perf_counter() - t0
    zs_ok = all(abs(r.z_score) <= 3 for r in lq.rows)
    bracket_ok = all(r.lower <= r.median and r.ci_lo <= r.upper for r in lq.rows)
    fit = conc.rate_fits[0]
    ok = zs_ok and bracket_ok and fit.passed and secs <= 120
    worst_z = max(abs(r.z_score) for r in lq.rows)
    report_criterion(7, ok, f"max |z| {worst_z:.2f} over q in {{2,4,6}} x 3 h; medians in bracket: {bracket_ok}; "
                            f"q=2 certified width slope {fit.certified_slope:.3f} (expect -0.5 +- 0.2), "
                            f"empirical {fit.empirical_slope:.3f}; {secs:.1f}s")
    assert ok


def test_c08_deterministic(report_criterion):
    t0 = time.perf_counter()
    res = run_deterministic_examples()
    secs = time.perf_counter() - t0
    slope = res.fits["meridian_slope"][0]
    even = [abs(v - 2) / 2 for e, _, v, _, _ in res.rows if e == "equator_zonal_even"]
    odd = [abs(v) for e, _, v, _, _ in res.rows if e == "equator_zonal_odd"]
    seg = [v <= t for e, _, v, t, _ in res.rows if e == "torus_segment"]
    ok = abs(slope - 0.5) <= 0.15 and max(even) <= 0.05 and max(odd) <= 1e-10 and all(seg) and secs <= 60
    report_criterion(8, ok, f"meridian slope {slope:.3f}; equator even max rel err {max(even):.2e}, "
                            f"odd max {max(odd):.1e}; segment <= 2/n for all n; {secs:.1f}s")
    assert ok


def _oracle_lgamma(x):
    return float(mpmath.loggamma(mpmath.mpf(x)))


def test_c09_numerics(report_criterion):
    t0 = time.perf_counter()
    mpmath.mp.dps = 40
    xs = np.geomspace(0.5, 1e6, 1000)
    lg = log_gamma(xs)
    err_g = max(abs(a - _oracle_lgamma(x)) / abs(_oracle_lgamma(x)) for a, x in zip(lg, xs))
    rng = np.random.default_rng(SEED)
    pairs = np.exp(rng.uniform(math.log(0.5), math.log(1e6), size=(1000, 2)))
    err_b = 0.0
    for a, b in pairs:
        exact = mpmath.log(mpmath.beta(mpmath.mpf(a), mpmath.mpf(b)))
        err_b = max(err_b, float(abs((log_beta(a, b) - exact) / exact)))

    # (manifold, submanifold, window, h); the 2-d subtorus rule has ~1e5 nodes, so it gets a small cluster
    small = SpectralWindow(1.0, 2.0)
    cases = [
        (T2, GAMMA),
        (T2, build_submanifold("torus_line", base=[0.3, 1.1], direction=[2, 3], closed=True)),
        (T2, build_submanifold("torus_line", base=[0.2, 0.5], direction=[1, math.sqrt(2)], length=2.5)),
        (T2, build_submanifold("torus_line", base=[0.0, 0.0], direction=[0, 1], length=1.0)),
        (T3, build_submanifold("torus_line", base=[0.1, 0.2, 0.3], direction=[1, 2, 2], length=4.0)),
    ]
    cases = [(m, s, WINDOW, 0.1 if m.dim == 2 else 0.2) for m, s in cases]
    cases.append((T3, SUBTORUS, small, 0.5))
    cases.append((T3, build_submanifold("torus_subtorus", fixed=[[0, 0.7]], ambient_dim=3), small, 0.5))
    err_p = 0.0
    for manifold, sub, window, h in cases:
        c = enumerate_cluster(manifold, window, h)
        cf = closed_form_periods(manifold, c.labels, sub)
        qd = quadrature_periods(manifold, c.labels, sub, c.max_frequency)
        err_p = max(err_p, float(np.max(np.abs(cf - qd))))
    secs = time.perf_counter() - t0
    ok = err_g <= 1e-12 and err_b <= 1e-12 and err_p <= 1e-10 and secs <= 10
    report_criterion(9, ok, f"log_gamma rel err {err_g:.1e}, log_beta rel err {err_b:.1e}, "
                            f"closed form vs quadrature {err_p:.1e}; {secs:.1f}s")
    assert ok


def test_c10_reproducibility(report_criterion, tmp_path):
    t0 = time.perf_counter()
    raw = {
        "version": 1,
        "manifold": {"kind": "torus", "dim": 2},
        "window": {"a": 1.0, "D": 6.0},
        "h_inv": [10, 15, 20, 30],
        "submanifold": {"kind": "torus_line", "direction": [1, 0], "closed": True},
        "q": [2, 4],
        "samples": 2000,
        "lq_samples": 500,
        "sweep_mc_samples": 500,
        "seed": SEED,
    }
    dirs = []
    for workers in (1, 3, 8):
        out = tmp_path / f"w{workers}"
        run("all", {**raw, "workers": workers}, str(out))
        dirs.append(out)
    names = sorted(p.name for p in dirs[0].glob("*.csv"))
    differing = [n for n in names for d in dirs[1:] if (d / n).read_bytes() != (dirs[0] / n).read_bytes()]
    secs = time.perf_counter() - t0
    ok = len(names) >= 10 and not differing and secs <= 30
    report_criterion(10, ok, f"{len(names)} CSVs byte-identical across workers 1, 3, 8: {not differing}; {secs:.1f}s")
    assert ok
