import numpy as np
import pytest

from opintegral.doi import funcalc
from opintegral.functions import Function2D, UniformGrid
from opintegral.heltonhowe import (SHIFT_SYMBOL, TraceExperimentConfig,
                                   band_additivity_check, corner_trace,
                                   lhs_corner_trace, model_pair, polynomial_suite,
                                   rhs_integral, trace_formula_experiment,
                                   winding_factor_experiment)
from opintegral.models import Symbol, disk_principal_function, principal_function
from opintegral.spectral import decompose

X = Function2D.polynomial([[0], [1]])
Y = Function2D.polynomial([[0, 1]])
X2 = Function2D.polynomial([[0], [0], [1]])
XY = Function2D.polynomial([[0, 0], [0, 1]])


def test_polynomial_suite_small():
    rows = polynomial_suite(n=64, m=16, resolution=1024)
    expected = {"x,y": 0.5, "x^2,y": 0.0, "x,y^2": 0.0, "x^2,y^2": 0.0,
                "x^2,xy": 0.25}
    for row in rows:
        assert row["lhs"] == pytest.approx(expected[row["pair"]], abs=1e-10)
        assert row["rhs"] == pytest.approx(expected[row["pair"]], abs=5e-3)


def test_corner_trace_oracle_first_column():
    # trace over the corner picks Toeplitz matrix elements: <A e0, e0> = 0 for cos
    a, b = model_pair(SHIFT_SYMBOL, 32)
    p0 = np.zeros((32, 32))
    p0[0, 0] = 1.0
    assert abs(np.trace(a @ p0)) <= 1e-14


def test_rhs_disk_oracles():
    g = disk_principal_function()
    val, scale = rhs_integral(X, Y, g, resolution=2048)
    assert val == pytest.approx(0.5, abs=5e-3)
    assert scale == pytest.approx(0.5, abs=5e-3)
    # odd-in-x Jacobian integrates to zero against the radial disk
    val, _ = rhs_integral(X2, Y, g, resolution=1024)
    assert abs(val) <= 1e-6
    # Jacobian of (x^2, xy) is 2 x^2; the disk integral of x^2 is pi / 4
    val, _ = rhs_integral(X2, XY, g, resolution=2048)
    assert val == pytest.approx(0.25, abs=5e-3)


def test_rhs_with_winding_principal_function():
    g = principal_function(SHIFT_SYMBOL)
    val, _ = rhs_integral(X, Y, g, resolution=1024)
    assert val == pytest.approx(0.5, abs=5e-3)


def test_lhs_antisymmetry_and_bilinearity():
    cfgxy = TraceExperimentConfig(phi=X, psi=Y, n=64, m=16)
    a, b = model_pair(SHIFT_SYMBOL, 64)
    decs = (decompose(a), decompose(b))
    lxy = lhs_corner_trace(cfgxy, decs)
    lyx = lhs_corner_trace(TraceExperimentConfig(phi=Y, psi=X, n=64, m=16), decs)
    assert lxy == pytest.approx(-lyx, abs=1e-12)
    # bilinearity: phi = x + 2 x^2 against y
    mix = Function2D.polynomial([[0], [1], [2]])
    lmix = lhs_corner_trace(TraceExperimentConfig(phi=mix, psi=Y, n=64, m=16), decs)
    lx = lhs_corner_trace(TraceExperimentConfig(phi=X, psi=Y, n=64, m=16), decs)
    lx2 = lhs_corner_trace(TraceExperimentConfig(phi=X2, psi=Y, n=64, m=16), decs)
    assert lmix == pytest.approx(lx + 2 * lx2, abs=1e-12)


def test_commuting_inputs_zero_trace():
    # B a polynomial in A: everything commutes, corner trace must vanish
    a, _ = model_pair(SHIFT_SYMBOL, 48)
    b = a @ a - 0.3 * a
    da, db = decompose(a), decompose(b)
    f = funcalc(X2, da, db)
    g = funcalc(XY, da, db)
    k = 1j * (f @ g - g @ f)
    val, _ = corner_trace(k, 12, None)
    assert abs(val) <= 1e-12


def test_corner_warning_when_window_too_large():
    cfg = TraceExperimentConfig(phi=X2, psi=XY, n=6, m=3)
    with pytest.warns(UserWarning, match="boundary bandwidth"):
        lhs_corner_trace(cfg)


def test_trace_experiment_gaussian_pair():
    phi = Function2D.closed_form("exp(-((x - 0.2)**2 + y**2) * 3)")
    psi = Function2D.closed_form("exp(-(x**2 + (y - 0.2)**2) * 3)")
    cfg = TraceExperimentConfig(phi=phi, psi=psi, n=256, m=64, resolution=1024,
                                n_table=(64, 128, 256), m_fractions=(0.25,))
    rep = trace_formula_experiment(cfg)
    # both sides agree within 5 percent of the Jacobian mass, and the
    # convergence-table error is non-increasing in n
    assert rep.abs_err <= 0.05 * rep.jacobian_scale
    errs = [row["abs_err"] for row in rep.convergence]
    assert errs[-1] <= errs[0] + 1e-12


def test_band_additivity_exact_for_band_limited_pair():
    from opintegral.besov import window_eval

    grid = UniformGrid(dim=2, period=32 * np.pi, points=256)
    ax = grid.axis()
    xg, yg = np.meshgrid(ax, ax, indexing="ij")
    band_range = (-3, 2)

    def project_fully_covered(values):
        # keep the mean plus only those frequencies every window sum covers
        # with weight exactly 1, so the dyadic pieces telescope exactly
        spec = np.fft.fft2(values)
        radii = grid.radial_frequencies()
        coverage = sum(window_eval(radii / 2.0 ** n)
                       for n in range(band_range[0], band_range[1] + 1))
        mask = np.abs(coverage - 1.0) <= 1e-12
        mask.flat[0] = True  # keep the mean
        return np.fft.ifft2(spec * mask)

    phi = Function2D.sampled(project_fully_covered(
        np.exp(-((xg - 0.2) ** 2 + yg ** 2) * 0.75)), grid)
    psi = Function2D.sampled(project_fully_covered(
        np.exp(-(xg ** 2 + (yg - 0.2) ** 2) * 0.75)), grid)
    cfg = TraceExperimentConfig(phi=phi, psi=psi, n=48, m=12, resolution=512)
    res = band_additivity_check(cfg, band_range=band_range, grid=grid)
    scale = max(abs(res["lhs_total"]), 1e-6)
    assert res["lhs_gap"] <= 1e-8 * max(1.0, scale)
    assert res["rhs_gap"] <= 1e-8 * max(1.0, scale)


def test_winding_factor_two_on_pure_double_symbol():
    wf = winding_factor_experiment(Symbol.from_dict({2: 1.0}), n_table=(64, 128),
                                   resolution=512)
    for row in wf["rows"]:
        assert row["ratio_flat"] == pytest.approx(2.0, rel=0.05)
        # consistency with the true (winding-weighted) quadrature
        assert row["err_true"] <= 0.02 * max(abs(wf["rhs_true"]), 1.0)


def test_winding_factor_perturbed_symbol_measures_area_ratio():
    # for e^{2 i theta} + e^{i theta}/2 the corner trace converges to the
    # g-weighted area 9/8 (algebraic area of the curve over 2 pi)
    wf = winding_factor_experiment(Symbol.from_dict({2: 1.0, 1: 0.5}),
                                   n_table=(64, 128), resolution=512)
    for row in wf["rows"]:
        assert row["lhs"] == pytest.approx(9.0 / 8.0, abs=5e-3)
    assert wf["rhs_true"] == pytest.approx(9.0 / 8.0, abs=5e-3)


def test_imag_residue_guard_polynomial_path():
    k = np.array([[1.0 + 1.0j, 0.0], [0.0, 1.0]])
    with pytest.raises(ArithmeticError, match="imaginary residue"):
        corner_trace(k, 2, 1e-10)
