import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randperiods.errors import DomainError, EmptyCluster
from randperiods.spectral import (Cluster, Manifold, SpectralWindow, count_cluster, enumerate_ball,
                                  enumerate_cluster, evaluate_modes, frequency_cutoff, weyl_prediction,
                                  window_bounds)

T2 = Manifold.torus(2)
T3 = Manifold.torus(3)
S2 = Manifold.sphere()


def brute_torus(dim, lo, hi):
    r = int(hi) + 1
    out = []
    for k in itertools.product(range(-r, r + 1), repeat=dim):
        f = math.sqrt(sum(v * v for v in k))
        if lo < f <= hi:
            out.append(k)
    return out


def test_standard_t2_cluster():
    c = enumerate_cluster(T2, SpectralWindow(1.0, 6.0), 0.1)
    assert c.dimension == 480
    assert sorted(map(tuple, c.labels.tolist())) == sorted(brute_torus(2, 10, 16))
    assert weyl_prediction(T2, SpectralWindow(1.0, 6.0), 0.1) == pytest.approx(156 * math.pi)


def test_sphere_cluster():
    c = enumerate_cluster(S2, SpectralWindow(1.0, 5.0), 0.1)
    assert c.dimension == 125  # degrees 10..14
    assert set(c.labels[:, 0].tolist()) == set(range(10, 15))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=12), st.floats(min_value=0.5, max_value=4.0), st.sampled_from([2, 3]))
def test_torus_matches_brute_force(inv_h, D, dim):
    w = SpectralWindow(1.0, D)
    lo, hi = window_bounds(w, 1.0 / inv_h)
    want = brute_torus(dim, lo, hi)
    m = Manifold.torus(dim)
    assert count_cluster(m, w, 1.0 / inv_h) == len(want)
    if want:
        c = enumerate_cluster(m, w, 1.0 / inv_h)
        assert sorted(map(tuple, c.labels.tolist())) == sorted(want)


def test_boundary_is_half_open():
    # |k| = 10 is excluded, |k| = 16 included
    c = enumerate_cluster(T2, SpectralWindow(1.0, 6.0), 0.1)
    assert 100 not in c.freq_sq
    assert 256 in c.freq_sq


def test_canonical_order_and_readonly():
    c = enumerate_cluster(T2, SpectralWindow(1.0, 3.0), 0.2)
    assert np.all(np.diff(c.freq_sq) >= 0)
    with pytest.raises(ValueError):
        c.labels[0, 0] = 99
    assert c.label_strings()[0].count(":") == 1


def test_empty_cluster_names_window():
    with pytest.raises(EmptyCluster) as e:
        enumerate_cluster(T2, SpectralWindow(1.0, 0.1), 0.5)
    assert "(2, 2.1]" in str(e.value)


def test_bad_inputs():
    with pytest.raises(DomainError):
        SpectralWindow(1.0, 0.0)
    with pytest.raises(DomainError):
        frequency_cutoff(0.0)
    with pytest.raises(DomainError):
        Manifold.torus(4)


def test_weyl_counts_within_twenty_percent():
    w = SpectralWindow(1.0, 6.0)
    for inv in (50, 100, 250, 500):
        n = count_cluster(T2, w, 1.0 / inv)
        assert abs(n / (2 * math.pi * 6 * inv) - 1) <= 0.2


def test_t3_large_count_is_fast():
    n = count_cluster(T3, SpectralWindow(1.0, 6.0), 1 / 320)
    assert n == 7_867_220


def test_modes_orthonormal_on_torus_grid():
    c = enumerate_cluster(T2, SpectralWindow(1.0, 2.0), 0.5)
    m = 16
    g = np.linspace(0, 2 * np.pi, m, endpoint=False)
    X, Y = np.meshgrid(g, g, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    V = evaluate_modes(T2, c.labels, pts)
    G = V.conj().T @ V * (2 * np.pi / m) ** 2
    assert np.allclose(G, np.eye(c.dimension), atol=1e-12)


def test_enumerate_ball_and_from_labels():
    labels, freq_sq = enumerate_ball(T2, 2.0)
    assert len(labels) == 13 and freq_sq.max() == 4
    w = SpectralWindow(1.0, 6.0)
    c = Cluster.from_labels(T2, w, 0.1, np.array([[11, 0], [-11, 0]]))
    assert c.dimension == 2


def test_torus_pointwise_weyl_identity():
    c = enumerate_cluster(T2, SpectralWindow(1.0, 6.0), 0.1)
    from randperiods.spectral import evaluate_modes_at_point
    b = evaluate_modes_at_point(c, np.array([0.3, 2.1]))
    assert np.sum(np.abs(b) ** 2) == pytest.approx(c.dimension / T2.volume, rel=1e-13)


def test_sphere_pole_and_addition_theorem():
    from randperiods.spectral import evaluate_modes_at_point
    c = enumerate_cluster(S2, SpectralWindow(1.0, 5.0), 0.1)
    pole = evaluate_modes_at_point(c, np.array([0.0, 0.0]))
    assert np.all(np.abs(pole[c.labels[:, 1] != 0]) <= 1e-15)
    b = evaluate_modes_at_point(c, np.array([1.1, 0.4]))
    for l in range(10, 15):
        sel = c.labels[:, 0] == l
        assert np.sum(np.abs(b[sel]) ** 2) == pytest.approx((2 * l + 1) / (4 * math.pi), rel=1e-10)


def test_sphere_empty_window():
    # sqrt(10 * 11) = 10.49 is the first sphere frequency above 10
    with pytest.raises(EmptyCluster):
        enumerate_cluster(S2, SpectralWindow(1.0, 0.4), 0.1)


def test_weyl_prediction_limits():
    assert weyl_prediction(T2, SpectralWindow(1.0, 1e-9), 0.1) == pytest.approx(0.0, abs=1e-6)
    w = SpectralWindow(1.0, 6.0)
    ratios = [weyl_prediction(T2, w, h) / count_cluster(T2, w, h) for h in (0.1, 0.01, 0.001)]
    assert abs(ratios[-1] - 1) < abs(ratios[0] - 1) and abs(ratios[-1] - 1) < 0.01
