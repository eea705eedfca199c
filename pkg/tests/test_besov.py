import numpy as np
import pytest

from opintegral.besov import (DEFAULT_GRID_1D, DEFAULT_GRID_2D, bandlimit_check,
                              besov_norm, lp_decompose, max_band, window_eval)
from opintegral.functions import Function2D, UniformGrid


def test_window_support_boundaries():
    assert window_eval(2.0) == 0.0
    assert window_eval(0.5) == 0.0
    assert window_eval(1.0) == pytest.approx(1.0)
    s = np.linspace(-1.0, 0.49, 50)
    assert np.all(window_eval(s) == 0.0)
    s = np.linspace(2.0, 10.0, 50)
    assert np.all(window_eval(s) == 0.0)


def test_window_dyadic_identity():
    s = np.linspace(1.0, 2.0, 1001)
    assert np.abs(window_eval(s) - (1.0 - window_eval(s / 2.0))).max() <= 1e-12


def test_window_partition_of_unity():
    s = np.linspace(0.01, 1000.0, 10 ** 4)
    total = sum(window_eval(s / 2.0 ** n) for n in range(-20, 21))
    assert np.abs(total - 1.0).max() <= 1e-10


def test_lp_decompose_sin_single_band():
    grid = DEFAULT_GRID_1D
    x = grid.axis()
    dec = lp_decompose(np.sin(x), grid)
    nonzero = [n for n, s in dec.sup_norms.items() if s > 1e-10]
    assert nonzero == [0]
    assert np.abs(dec.bands[0] - np.sin(x)).max() <= 1e-10


def test_lp_decompose_intermediate_frequency():
    grid = DEFAULT_GRID_1D
    x = grid.axis()
    f = np.cos(1.5 * x)
    dec = lp_decompose(f, grid)
    nonzero = sorted(n for n, s in dec.sup_norms.items() if s > 1e-10)
    assert nonzero == [0, 1]
    assert np.abs(dec.bands[0] + dec.bands[1] - f).max() <= 1e-8


def test_lp_decompose_constant_zero_bands():
    grid = DEFAULT_GRID_1D
    dec = lp_decompose(np.ones(grid.points), grid)
    assert all(s <= 1e-12 for s in dec.sup_norms.values())


def test_lp_decompose_band_support():
    grid = DEFAULT_GRID_1D
    x = grid.axis()
    dec = lp_decompose(np.sin(x) + 0.5 * np.sin(6.125 * x), grid)
    radii = grid.radial_frequencies()
    for n, band in dec.bands.items():
        spec = np.abs(np.fft.fft(band)) ** 2
        outside = spec[(radii < 2.0 ** (n - 1)) | (radii > 2.0 ** (n + 1))].sum()
        assert outside <= 1e-9 * max(spec.sum(), 1e-300)


def test_band_support_orthogonality():
    grid = DEFAULT_GRID_1D
    x = grid.axis()
    dec = lp_decompose(np.sin(x) + np.sin(5 * x) + np.sin(17.3125 * x), grid)
    bands = sorted(dec.bands)
    for i, n in enumerate(bands):
        for m in bands[i + 2:]:
            fn = np.fft.fft(dec.bands[n])
            fm = np.fft.fft(dec.bands[m])
            assert np.abs(fn * fm).max() <= 1e-9 * (
                max(np.abs(fn).max(), 1e-300) * max(np.abs(fm).max(), 1e-300))


def test_nyquist_rejection_reports_resolution():
    grid = UniformGrid(dim=1, period=2 * np.pi, points=64)
    with pytest.raises(ValueError, match="points per axis"):
        lp_decompose(np.zeros(64), grid, band_range=(0, 12))


def test_uncovered_mass_warning():
    grid = DEFAULT_GRID_1D
    x = grid.axis()
    with pytest.warns(UserWarning, match="spectral mass"):
        lp_decompose(np.sin(40.0 * x), grid, band_range=(-2, 2))


def test_besov_sin_value_one():
    grid = DEFAULT_GRID_1D
    bn = besov_norm(np.sin(grid.axis()), grid)
    assert bn.value == pytest.approx(1.0, abs=1e-6)


def test_besov_polynomial_variant_zero():
    phi = Function2D.polynomial([[1.0, 2.0], [3.0, 0.0]])
    assert besov_norm(phi).value == 0.0


def test_besov_constant_samples_tiny():
    grid = DEFAULT_GRID_1D
    bn = besov_norm(np.full(grid.points, 2.7), grid)
    assert bn.value <= 1e-8


def test_besov_dyadic_dilation_doubles():
    grid = DEFAULT_GRID_1D
    x = grid.axis()
    v1 = besov_norm(np.sin(x), grid).value
    v2 = besov_norm(np.sin(2 * x), grid).value
    assert v2 / v1 == pytest.approx(2.0, rel=1e-10)


def test_besov_general_p_q():
    grid = DEFAULT_GRID_1D
    x = grid.axis()
    f = np.sin(x) + np.sin(2 * x)
    b_inf = besov_norm(f, grid, s=1.0, p=np.inf, q=np.inf)
    b_one = besov_norm(f, grid, s=1.0, p=np.inf, q=1.0)
    assert b_inf.value <= b_one.value
    b_l2 = besov_norm(f, grid, s=0.5, p=2.0, q=2.0)
    # ||sin kx||_{L^2} = sqrt(L/2); bands n = 0 and 1 weighted by 2^(n s)
    expected = np.sqrt((grid.period / 2) * (2.0 ** 0 + 2.0 ** 1))
    assert b_l2.value == pytest.approx(expected, rel=1e-6)


def test_reconstruction_modulo_mean():
    grid = DEFAULT_GRID_1D
    x = grid.axis()
    f = 0.3 + np.sin(x) + 0.2 * np.sin(7.3125 * x)
    dec = lp_decompose(f, grid)
    recon = dec.reconstruction()
    assert np.abs(recon - (f - 0.3)).max() <= 1e-8 * np.abs(f).max()


def test_bandlimit_check_cases():
    grid = DEFAULT_GRID_1D
    x = grid.axis()
    ok, leak = bandlimit_check(np.sin(x), grid, 1.0)
    assert ok and leak <= 1e-12
    ok, leak = bandlimit_check(np.sin(2 * x), grid, 1.0)
    assert not ok and leak == pytest.approx(1.0)
    ok, leak = bandlimit_check(np.exp(-x ** 2), grid, 8.0)
    assert ok and leak <= 1e-9


def test_bandlimit_check_needs_resolution():
    grid = UniformGrid(dim=1, period=2 * np.pi, points=16)
    with pytest.raises(ValueError, match="Nyquist"):
        bandlimit_check(np.zeros(16), grid, 100.0)


def test_two_dimensional_decomposition():
    grid = DEFAULT_GRID_2D
    ax = grid.axis()
    f = np.sin(ax)[:, None] * np.cos(ax)[None, :]  # radius sqrt(2) ring
    dec = lp_decompose(f, grid)
    nonzero = sorted(n for n, s in dec.sup_norms.items() if s > 1e-10)
    assert nonzero == [0, 1]  # |xi| = sqrt(2) sits in windows n = 0 and 1
    assert np.abs(dec.bands[0] + dec.bands[1] - f).max() <= 1e-8


def test_max_band_matches_nyquist():
    grid = DEFAULT_GRID_1D  # nyquist 64
    assert max_band(grid) == 5
    assert 2.0 ** (max_band(grid) + 1) <= grid.nyquist
