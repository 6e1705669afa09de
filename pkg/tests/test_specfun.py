import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twedge.specfun import (
    SERIES_HI,
    SERIES_LO,
    TAYLOR_LO,
    airy_ai,
    airy_ai_prime,
    airy_pair,
    det_batch,
    det_dense,
    gauss_legendre_rule,
)

mpmath.mp.dps = 40


def mp_ai(x):
    return float(mpmath.airyai(x)), float(mpmath.airyai(x, derivative=1))


def test_airy_values_at_zero():
    assert airy_ai(0.0) == pytest.approx(0.355028053887817, abs=1e-15)
    assert airy_ai_prime(0.0) == pytest.approx(-0.258819403792807, abs=1e-15)


def test_airy_at_ten():
    assert airy_ai(10.0) == pytest.approx(1.1047532553e-10, rel=1e-9)
    assert airy_ai_prime(10.0) < 0


def test_airy_against_mpmath_dense_sweep():
    xs = np.linspace(-12.0, 20.0, 3201)
    ai, aip = airy_pair(xs)
    ref = np.array([mp_ai(x) for x in xs])
    assert np.max(np.abs(ai - ref[:, 0])) <= 1e-12
    assert np.max(np.abs(aip - ref[:, 1])) <= 1e-12


@pytest.mark.parametrize("edge", [TAYLOR_LO, SERIES_LO, SERIES_HI])
def test_airy_continuous_across_method_switches(edge):
    # both sides of each switch meet the accuracy target
    for x in (np.nextafter(edge, -np.inf), edge, np.nextafter(edge, np.inf)):
        ai, aip = airy_pair(x)
        ref_ai, ref_aip = mp_ai(x)
        assert abs(ai - ref_ai) <= 1e-12
        assert abs(aip - ref_aip) <= 1e-12


def test_airy_satisfies_its_ode():
    # Ai'' = x Ai, checked with a central difference of Ai'
    h = 1e-5
    for x in np.linspace(-11.0, 10.0, 43):
        d2 = (airy_ai_prime(x + h) - airy_ai_prime(x - h)) / (2 * h)
        assert d2 == pytest.approx(x * airy_ai(x), abs=1e-8)


@pytest.mark.parametrize("x", [-2.0, 0.0, 2.0])
def test_airy_derivative_matches_finite_difference(x):
    h = 1e-5
    fd = (airy_ai(x + h) - airy_ai(x - h)) / (2 * h)
    assert fd == pytest.approx(airy_ai_prime(x), abs=1e-9)


def test_airy_positive_and_decreasing_on_right_half_line():
    xs = np.linspace(0.0, 40.0, 2001)
    ai = airy_ai(xs)
    assert np.all(ai > 0)
    assert np.all(np.diff(ai) < 0)
    assert airy_ai(100.0) < 1e-280


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_airy_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        airy_ai(bad)
    with pytest.raises(ValueError):
        airy_ai_prime(np.array([0.0, bad]))


def test_airy_array_shape_preserved():
    x = np.zeros((3, 4))
    assert airy_ai(x).shape == (3, 4)
    assert isinstance(airy_ai(1.0), float)


def test_gauss_legendre_two_point():
    rule = gauss_legendre_rule(2)
    np.testing.assert_allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    np.testing.assert_allclose(rule.weights, [1.0, 1.0], atol=1e-15)


def test_gauss_legendre_three_point():
    rule = gauss_legendre_rule(3)
    r = math.sqrt(3 / 5)
    np.testing.assert_allclose(rule.nodes, [-r, 0.0, r], atol=1e-15)
    np.testing.assert_allclose(rule.weights, [5 / 9, 8 / 9, 5 / 9], atol=1e-15)


def test_gauss_legendre_x6_exact_with_four_points():
    assert gauss_legendre_rule(4).integrate(lambda x: x ** 6) == pytest.approx(2 / 7, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(m=st.integers(2, 512))
def test_gauss_legendre_invariants(m):
    rule = gauss_legendre_rule(m)
    assert len(rule) == m
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(np.abs(rule.nodes) < 1)
    np.testing.assert_array_equal(rule.nodes, -rule.nodes[::-1])
    assert np.all(rule.weights > 0)
    assert abs(rule.weights.sum() - 2.0) <= 1e-14 * max(1, m / 64)


@pytest.mark.parametrize("m", [5, 16, 33, 64])
def test_gauss_legendre_degree_exactness(m):
    rule = gauss_legendre_rule(m)
    for k in range(0, 2 * m, 3):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert rule.integrate(lambda x: x ** k) == pytest.approx(exact, abs=1e-13)


@pytest.mark.parametrize("m", [0, 1, 513, 2.5, True])
def test_gauss_legendre_rejects_bad_order(m):
    with pytest.raises(ValueError):
        gauss_legendre_rule(m)


def test_det_small_cases():
    assert det_dense([[2.0]]) == 2.0
    assert det_dense([[0.0, 1.0], [1.0, 0.0]]) == pytest.approx(-1.0)
    assert det_dense(np.eye(5) * 3) == pytest.approx(243.0)
    assert det_dense([[1.0, 2.0], [2.0, 4.0]]) == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(m=st.integers(1, 30), seed=st.integers(0, 2 ** 32 - 1))
def test_det_matches_numpy(m, seed):
    a = np.random.default_rng(seed).standard_normal((m, m))
    assert det_dense(a) == pytest.approx(np.linalg.det(a), rel=1e-9, abs=1e-12)


def test_det_batch_shape_and_values():
    a = np.random.default_rng(1).standard_normal((2, 3, 6, 6))
    d = det_batch(a)
    assert d.shape == (2, 3)
    np.testing.assert_allclose(d, np.linalg.det(a), rtol=1e-10)


def test_det_rejects_bad_input():
    with pytest.raises(ValueError):
        det_dense(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        det_dense(np.eye(513))
