import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randperiods.errors import DomainError
from randperiods.special import beta, log_beta, log_gamma

mpmath.mp.dps = 40


def test_exact_values():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(2.0) == 0.0
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-15)
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-15)


def test_log_beta_oracle():
    want = float(mpmath.log(mpmath.beta(0.5, 20)))
    assert log_beta(0.5, 20) == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("n", [2, 10, 100])
def test_beta_one_n(n):
    assert beta(1, n) == pytest.approx(1.0 / n, rel=1e-14)


def test_array_input_matches_scalar():
    xs = np.array([0.5, 1.5, 3.0, 12.0, 1e5])
    assert np.allclose(log_gamma(xs), [log_gamma(float(x)) for x in xs], rtol=0, atol=0)


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5])
def test_nonpositive_raises(bad):
    with pytest.raises(DomainError):
        log_gamma(bad)
    with pytest.raises(DomainError):
        log_beta(bad, 2.0)
    with pytest.raises(DomainError):
        log_beta(2.0, bad)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.5, max_value=1e6))
def test_log_gamma_relative_error(x):
    want = mpmath.loggamma(mpmath.mpf(x))
    if want == 0:
        assert log_gamma(x) == 0.0
        return
    assert abs((log_gamma(x) - float(want)) / float(want)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.5, max_value=1e6), st.floats(min_value=0.5, max_value=1e6))
def test_log_beta_relative_error(a, b):
    want = float(mpmath.log(mpmath.beta(mpmath.mpf(a), mpmath.mpf(b))))
    got = log_beta(a, b)
    assert abs(got - want) <= 1e-12 * max(abs(want), 1e-300)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.5, max_value=1e4), st.floats(min_value=0.5, max_value=1e4))
def test_log_beta_symmetric(a, b):
    assert log_beta(a, b) == pytest.approx(log_beta(b, a), rel=1e-14, abs=1e-14)
