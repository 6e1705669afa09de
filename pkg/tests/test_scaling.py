import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twedge.scaling import (
    LinearScale,
    Shape,
    cdf_largest,
    cdf_smallest,
    constants_largest,
    constants_largest_new,
    constants_largest_old,
    constants_smallest,
    pvalue_largest,
    pvalue_smallest,
    spiked_sequence,
)
from twedge.tw import f1_cdf, g1_cdf

dims = st.integers(1, 10_000)


@pytest.mark.parametrize("n,p", [(0, 1), (1, 0), (-3, 2), (2.0, 1), (True, 1)])
def test_shape_rejects_invalid(n, p):
    with pytest.raises(ValueError):
        Shape(n, p)


def test_shape_accepts_numpy_ints():
    s = Shape(np.int64(5), np.int32(3))
    assert (s.n, s.p) == (5, 3) and type(s.n) is int
    assert str(s) == "5x3"


def test_new_constants_square():
    c = constants_largest_new(Shape(100, 100))
    assert c.mu == pytest.approx(398.0, abs=1e-12)
    assert c.sigma == pytest.approx(2 ** (4 / 3) * 99.5 ** (1 / 3), rel=1e-14)
    assert c.sigma == pytest.approx(11.677, abs=1e-3)


@settings(max_examples=200)
@given(n=dims)
def test_new_constants_square_mu(n):
    assert constants_largest_new(Shape(n, n)).mu == pytest.approx(4 * n - 2, rel=1e-14)


@settings(max_examples=200)
@given(n=dims, p=dims)
def test_new_constants_symmetric(n, p):
    assert constants_largest_new(Shape(n, p)) == constants_largest_new(Shape(p, n))


@settings(max_examples=300)
@given(n=dims, p=dims)
def test_linear_scale_formulas(n, p):
    a, b = math.sqrt(n - 0.5), math.sqrt(p - 0.5)
    c = constants_largest_new(Shape(n, p))
    assert c.mu == pytest.approx((a + b) ** 2, rel=1e-14)
    assert c.sigma == pytest.approx((a + b) * (1 / a + 1 / b) ** (1 / 3), rel=1e-14)
    assert c.mu > 0 and c.sigma > 0
    if n >= 2:
        a, b = math.sqrt(n - 1), math.sqrt(p)
        c = constants_largest_old(Shape(n, p))
        assert c.mu == pytest.approx((a + b) ** 2, rel=1e-14)
        assert c.sigma == pytest.approx((a + b) * (1 / a + 1 / b) ** (1 / 3), rel=1e-14)


def test_old_constants_examples():
    assert constants_largest_old(Shape(100, 100)).mu == pytest.approx((math.sqrt(99) + 10) ** 2)
    assert constants_largest_old(Shape(100, 100)).mu == pytest.approx(397.9975, abs=1e-4)
    assert constants_largest_old(Shape(2, 1)).mu == 4.0
    s = Shape(500, 5)
    assert abs(constants_largest_old(s).mu - constants_largest_new(s).mu) > 1


def test_old_constants_reject_n1():
    with pytest.raises(ValueError):
        constants_largest_old(Shape(1, 3))


def test_constants_largest_dispatch():
    s = Shape(30, 7)
    assert constants_largest(s, "new") == constants_largest_new(s)
    assert constants_largest(s, "old") == constants_largest_old(s)
    with pytest.raises(ValueError):
        constants_largest(s, "newer")


def test_smallest_constants_4x2():
    c = constants_smallest(Shape(4, 2))
    mu = (math.sqrt(3.5) - math.sqrt(1.5)) ** 2
    assert c.mu_minus == pytest.approx(mu, rel=1e-15)
    assert c.mu_minus == pytest.approx(0.41742, abs=1e-5)
    sigma = (math.sqrt(3.5) - math.sqrt(1.5)) * (1 / math.sqrt(1.5) - 1 / math.sqrt(3.5)) ** (1 / 3)
    assert c.sigma_minus == pytest.approx(sigma, rel=1e-15)
    assert c.tau == pytest.approx(1.01496, abs=1e-5)
    assert c.nu == pytest.approx(-0.74488, abs=1e-5)


@settings(max_examples=300)
@given(p=st.integers(1, 9_999), extra=st.integers(1, 10_000))
def test_log_scale_identities(p, extra):
    c = constants_smallest(Shape(p + extra, p))
    assert c.mu_minus > 0 and c.sigma_minus > 0 and c.tau > 0
    assert c.tau == pytest.approx(c.sigma_minus / c.mu_minus, rel=1e-14)
    assert c.nu == pytest.approx(math.log(c.mu_minus) + c.tau ** 2 / 8, rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("n,p", [(5, 5), (3, 5)])
def test_smallest_constants_reject_n_le_p(n, p):
    with pytest.raises(ValueError):
        constants_smallest(Shape(n, p))


def test_cdf_largest_anchor(grid):
    s = Shape(100, 100)
    c = constants_largest_new(s)
    assert cdf_largest(c.mu + c.sigma * 0.9793, s, "new", grid) == pytest.approx(0.95, abs=5e-4)
    assert cdf_largest(0.0, s, "new", grid) == pytest.approx(0.0, abs=1e-12)


def test_cdf_largest_vectorised(grid):
    s = Shape(20, 5)
    x = np.linspace(0, 100, 11)
    np.testing.assert_array_equal(cdf_largest(x, s, "old", grid),
                                  [cdf_largest(v, s, "old", grid) for v in x])


def test_cdf_largest_rejects_negative(grid):
    with pytest.raises(ValueError):
        cdf_largest(-1.0, Shape(5, 5), "new", grid)


@pytest.mark.parametrize("t,expected,tol", [(0.4535, 0.0996, 5e-4), (1.4949, 0.0235, 5e-4),
                                            (4.3162, 1.1e-4, 0.1 * 1.1e-4)])
def test_pvalue_on_statistic_scale(grid, t, expected, tol):
    shape = Shape(100, 100)
    c = constants_largest_new(shape)
    assert pvalue_largest(c.mu + c.sigma * t, shape, grid) == pytest.approx(expected, abs=tol)


def test_pvalue_tiny_for_large_statistic(grid):
    shape = Shape(87, 5)
    c = constants_largest_new(shape)
    assert pvalue_largest(c.mu + c.sigma * 14.5934, shape, grid) < 1e-6


def test_pvalue_largest_strictly_decreasing(grid):
    shape = Shape(50, 10)
    c = constants_largest_new(shape)
    x = c.mu + c.sigma * np.linspace(-5, 5, 400)
    assert np.all(np.diff(pvalue_largest(x, shape, grid)) < 0)


def test_pvalue_estimate_scale(grid):
    shape = Shape(40, 8)
    x = 75.0
    exact = pvalue_largest(x, shape, grid)
    # unit-scale trace leaves the statistic unchanged
    assert pvalue_largest(x, shape, grid, estimate_scale=True, trace=40 * 8) == exact
    # a common noise level cancels
    c = 3.7
    assert pvalue_largest(c * x, shape, grid, estimate_scale=True, trace=c * 320) == pytest.approx(exact, abs=1e-14)
    with pytest.raises(ValueError):
        pvalue_largest(x, shape, grid, estimate_scale=True)


def test_cdf_smallest_center(grid):
    for n, p in [(4, 2), (30, 7), (400, 100)]:
        c = constants_smallest(Shape(n, p))
        assert cdf_smallest(math.exp(c.nu), Shape(n, p), grid) == pytest.approx(g1_cdf(0.0, grid), abs=1e-14)
        assert g1_cdf(0.0, grid) == 1 - f1_cdf(0.0, grid)


def test_cdf_smallest_median(grid):
    shape = Shape(200, 100)
    c = constants_smallest(shape)
    assert cdf_smallest(math.exp(c.nu + c.tau * 1.2686), shape, grid) == pytest.approx(0.5, abs=5e-4)


def test_cdf_smallest_monotone_and_lower_tail(grid):
    shape = Shape(50, 10)
    x = np.linspace(5, 40, 300)
    v = cdf_smallest(x, shape, grid)
    assert np.all(np.diff(v) > 0)
    np.testing.assert_array_equal(pvalue_smallest(x, shape, grid), v)


def test_cdf_smallest_rejects(grid):
    with pytest.raises(ValueError):
        cdf_smallest(0.0, Shape(10, 2), grid)
    with pytest.raises(ValueError):
        cdf_smallest(1.0, Shape(2, 2), grid)


def test_spiked_equal_eigenvalues(grid):
    n, c = 87, 2.5
    res = spiked_sequence([c] * 5, n, 0, grid)
    scale = constants_largest_new(Shape(n, 5))
    assert len(res) == 1
    assert res[0].tau_sq_hat == c
    assert res[0].statistic == pytest.approx((n - scale.mu) / scale.sigma, rel=1e-14)


def test_spiked_sequence_structure(grid):
    eigs = [30.0, 12.0, 6.0, 5.0, 3.5]
    res = spiked_sequence(eigs, 87, None, grid)
    assert [r.k for r in res] == [0, 1, 2, 3]
    for r in res:
        assert r.tau_sq_hat == pytest.approx(np.mean(eigs[r.k:]))
        scale = constants_largest_new(Shape(87, 5 - r.k))
        t = (87 * eigs[r.k] / r.tau_sq_hat - scale.mu) / scale.sigma
        assert r.statistic == pytest.approx(t, rel=1e-14)
        assert r.pvalue == 1 - f1_cdf(r.statistic, grid)
        assert 0 <= r.pvalue <= 1


@settings(max_examples=100, deadline=None)
@given(eigs=st.lists(st.floats(0.01, 1e3), min_size=3, max_size=12),
       c=st.floats(1e-6, 1e6), n=st.integers(1, 500))
def test_spiked_scale_invariance(grid, eigs, c, n):
    eigs = sorted(eigs, reverse=True)
    a = spiked_sequence(eigs, n, None, grid)
    b = spiked_sequence([c * e for e in eigs], n, None, grid)
    for x, y in zip(a, b):
        assert y.statistic == pytest.approx(x.statistic, rel=1e-12, abs=1e-12)
        assert y.pvalue == pytest.approx(x.pvalue, rel=1e-12, abs=1e-12)


def test_spiked_rejects_bad_input(grid):
    with pytest.raises(ValueError):
        spiked_sequence([1.0, 2.0, 0.5], 10, None, grid)
    with pytest.raises(ValueError):
        spiked_sequence([3.0, 2.0, 1.0], 10, 2, grid)
    with pytest.raises(ValueError):
        spiked_sequence([3.0, 2.0, 1.0], 10, -1, grid)
    with pytest.raises(ValueError):
        spiked_sequence([3.0, -2.0, -4.0], 10, 0, grid)


def test_linear_scale_standardize():
    assert LinearScale(2.0, 4.0).standardize(10.0) == 2.0
