import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import airy

from conftest import TABLE_ABSCISSAE, TABLE_LEVELS
from twedge.tw import (
    GridConfig,
    TwGrid,
    build_grid,
    default_grid,
    export_csv,
    f1_cdf,
    f1_fredholm,
    f1_pdf,
    f1_quantile,
    g1_cdf,
    load_grid,
    save_grid,
)


def f1_reference(s, m=200, length=24.0):
    """Independent oracle: truncate (s, inf) to (s, s + length), use numpy's
    Gauss-Legendre nodes, scipy's Airy and numpy's determinant."""
    xi, w = np.polynomial.legendre.leggauss(m)
    x = s + 0.5 * length * (xi + 1.0)
    w = 0.5 * length * w
    k = 0.5 * airy(0.5 * (x[:, None] + x[None, :]))[0]
    r = np.sqrt(w)
    return np.linalg.det(np.eye(m) - r[:, None] * k * r[None, :])


@pytest.mark.parametrize("s,q", list(zip(TABLE_ABSCISSAE, TABLE_LEVELS)))
def test_fredholm_table_anchor(s, q):
    assert f1_fredholm(s) == pytest.approx(q, abs=5e-4)


@pytest.mark.parametrize("s", [-8.0, -4.0, -2.0, -1.0, 0.0, 1.5, 3.0, 5.0])
def test_fredholm_matches_independent_oracle(s):
    assert f1_fredholm(s) == pytest.approx(f1_reference(s), abs=1e-11)


def test_fredholm_median():
    assert f1_fredholm(-1.2686) == pytest.approx(0.5, abs=5e-4)


def test_fredholm_right_tail_at_six():
    # The right tail is not below 1e-6 at s = 6: 1 - F1(6) is about 1.9e-6
    # (independent truncated-domain oracle agrees).
    tail = 1.0 - f1_fredholm(6.0)
    assert 1e-6 < tail < 3e-6
    assert tail == pytest.approx(1.0 - f1_reference(6.0), rel=1e-4)


def test_fredholm_quadrature_self_convergence():
    assert f1_fredholm(0.0, 48) == pytest.approx(f1_fredholm(0.0, 64), abs=1e-10)


def test_fredholm_geometric_convergence():
    ref = f1_fredholm(-6.0, 160)
    errs = [abs(f1_fredholm(-6.0, m) - ref) for m in (16, 24, 32)]
    assert errs[0] > errs[1] > errs[2] or errs[2] < 1e-13


@pytest.mark.parametrize("s,m", [(-12.5, 64), (10.5, 64), (0.0, 7), (0.0, 513)])
def test_fredholm_rejects_out_of_range(s, m):
    with pytest.raises(ValueError):
        f1_fredholm(s, m)


def test_grid_size_arithmetic():
    assert GridConfig(-10.0, 6.0, 0.02).size == 801
    assert GridConfig().size == 901


def test_default_grid_invariants(grid):
    v = grid.cdf_values
    assert len(v) == (grid.s_max - grid.s_min) / grid.step + 1 or len(v) == grid.config.size
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(np.diff(v) >= 0)
    assert v[0] < 1e-10
    assert v[-1] > 1 - 1e-6
    assert not v.flags.writeable


def test_grid_interpolation_at_095(grid):
    assert f1_cdf(0.9793, grid) == pytest.approx(0.95, abs=5e-4)


def test_cache_round_trip_bit_exact(grid, tmp_path):
    path = tmp_path / "grid.bin"
    save_grid(grid, path)
    again = load_grid(path)
    np.testing.assert_array_equal(again.cdf_values, grid.cdf_values)
    assert again.config == grid.config


def test_cache_rejects_corrupt_file(grid, tmp_path):
    path = tmp_path / "grid.bin"
    save_grid(grid, path)
    data = path.read_bytes()
    path.write_bytes(b"XXXXXXXX" + data[8:])
    with pytest.raises(ValueError):
        load_grid(path)
    path.write_bytes(data[:-8])
    with pytest.raises(ValueError):
        load_grid(path)


def test_default_grid_uses_cache_file(tmp_path, monkeypatch):
    monkeypatch.setenv("TWEDGE_CACHE_DIR", str(tmp_path))
    config = GridConfig(-4.0, 2.0, 0.25, 32)
    g = default_grid(config)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    g2 = default_grid(config, rebuild=True)
    np.testing.assert_array_equal(g.cdf_values, g2.cdf_values)


def test_export_csv(grid, tmp_path):
    path = tmp_path / "f1.csv"
    export_csv(grid, path)
    rows = path.read_text().splitlines()
    assert rows[0] == "s,F1"
    assert len(rows) == len(grid.cdf_values) + 1


def test_build_grid_small_config_matches_default(grid):
    small = build_grid(GridConfig(-2.0, 2.0, 0.5, 64))
    np.testing.assert_allclose(small.cdf_values, f1_cdf(small.abscissae, grid), atol=1e-12)


def test_twgrid_rejects_wrong_length():
    with pytest.raises(ValueError):
        TwGrid(0.0, 1.0, 0.5, 64, np.zeros(4))


@pytest.mark.parametrize("s,q", list(zip(TABLE_ABSCISSAE, TABLE_LEVELS)))
def test_cdf_anchor(grid, s, q):
    assert f1_cdf(s, grid) == pytest.approx(q, abs=5e-4)


def test_cdf_saturation(grid):
    assert f1_cdf(-20.0, grid) == 0.0
    assert f1_cdf(20.0, grid) == 1.0
    assert isinstance(f1_cdf(0.0, grid), float)


def test_cdf_off_grid_matches_fredholm(grid):
    s = np.array([-7.013, -3.3333, -1.2686, -0.011, 0.9793, 2.0234, 4.4441])
    exact = np.array([f1_fredholm(x) for x in s])
    np.testing.assert_allclose(f1_cdf(s, grid), exact, atol=1e-6)


@settings(max_examples=200, deadline=None)
@given(a=st.floats(-15, 15), b=st.floats(-15, 15))
def test_cdf_monotone(grid, a, b):
    lo, hi = min(a, b), max(a, b)
    assert f1_cdf(lo, grid) <= f1_cdf(hi, grid)


@settings(max_examples=200, deadline=None)
@given(s=st.floats(-30, 30))
def test_reflection_identity(grid, s):
    assert g1_cdf(s, grid) + f1_cdf(-s, grid) == 1.0


def test_g1_examples(grid):
    assert g1_cdf(1.2686, grid) == pytest.approx(0.5, abs=5e-4)
    assert g1_cdf(-0.9793, grid) == pytest.approx(0.05, abs=5e-4)


@pytest.mark.parametrize("s,q", list(zip(TABLE_ABSCISSAE, TABLE_LEVELS)))
def test_quantile_anchor(grid, s, q):
    x = f1_quantile(q, grid)
    assert x == pytest.approx(s, abs=2e-3)
    assert abs(f1_cdf(x, grid) - q) <= 1e-7


@pytest.mark.parametrize("s", [-3.0, -1.0, 0.0, 1.0, 2.0])
def test_quantile_round_trip(grid, s):
    assert f1_quantile(f1_cdf(s, grid), grid) == pytest.approx(s, abs=1e-5)


@settings(max_examples=200, deadline=None)
@given(q=st.floats(1e-8, 1 - 1e-8))
def test_quantile_inverts_cdf(grid, q):
    assert abs(f1_cdf(f1_quantile(q, grid), grid) - q) <= 1e-7


def test_quantile_vectorised(grid):
    qs = np.array(TABLE_LEVELS)
    np.testing.assert_allclose(f1_quantile(qs, grid), TABLE_ABSCISSAE, atol=2e-3)


@pytest.mark.parametrize("q", [0.0, 1.0, 5e-9, 1 - 5e-9, np.nan, -0.1])
def test_quantile_rejects_out_of_range(grid, q):
    with pytest.raises(ValueError):
        f1_quantile(q, grid)


def test_pdf_properties(grid):
    s = grid.abscissae
    pdf = f1_pdf(s, grid)
    assert np.all(pdf >= 0)
    assert np.trapezoid(pdf, s) == pytest.approx(1.0, abs=1e-4)
    mode = s[np.argmax(pdf)]
    assert -2.0 < mode < 0.0
    assert f1_pdf(-30.0, grid) == 0.0


def test_pdf_matches_fredholm_difference(grid):
    h = 1e-3
    for s in (-3.0, -1.2, 0.5):
        fd = (f1_fredholm(s + h) - f1_fredholm(s - h)) / (2 * h)
        assert f1_pdf(s, grid) == pytest.approx(fd, abs=1e-5)
