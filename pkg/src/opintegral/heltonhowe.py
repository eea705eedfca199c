"""Both sides of the trace formula on Toeplitz models.

Left side: for truncations A_N = T_{Re f}, B_N = T_{Im f} of a
trig-polynomial symbol f, form K = i [phi(A_N, B_N), psi(A_N, B_N)] and take
the trace of the leading M x M corner.  The full trace of a finite
commutator is identically zero; the infinite-dimensional trace survives in
the corner because for banded data the truncation defect is pinned to the
bottom-right edge (for the shift model, i [A_N, B_N] = (P_0 - P_{N-1}) / 2
exactly).  For polynomial phi, psi and M, N - M both beyond the combined
bandwidths the corner trace is exact, not asymptotic.

Right side: (1 / 2 pi) times the integral of the Jacobian
d(phi, psi) / d(x, y) against the principal function g, by midpoint tensor
quadrature over the bounding box of supp g (g is integer-valued and
piecewise constant, so higher-order rules buy nothing).
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .doi import funcalc
from .functions import Function2D, UniformGrid
from .models import PrincipalFunction, Symbol, principal_function, toeplitz_matrix
from .besov import lp_decompose, plateau
from .spectral import decompose

IMAG_RESIDUE_RTOL = 1e-10

SHIFT_SYMBOL = Symbol.from_dict({1: 1.0})


def thread_cap(default: int = 1) -> int:
    """Parallelism cap from OPINTEGRAL_THREADS (experiments are cheap to
    keep serial; the cap exists so batch runs can be throttled)."""
    try:
        return max(1, int(os.environ.get("OPINTEGRAL_THREADS", default)))
    except ValueError:
        return default


@dataclass
class TraceExperimentConfig:
    """Inputs of one trace-formula experiment.

    symbol f defines the model pair A = T_{Re f}, B = T_{Im f}; the default
    is the shift model (A = T_cos, B = T_sin, principal function = indicator
    of the unit disk).  m defaults to n // 4.
    """

    phi: Function2D
    psi: Function2D
    symbol: Symbol = field(default_factory=lambda: SHIFT_SYMBOL)
    n: int = 128
    m: int | None = None
    resolution: int = 2048
    n_table: tuple = (128, 256, 512)
    m_fractions: tuple = (0.125, 0.25, 0.5)
    g: PrincipalFunction | None = None

    def corner(self) -> int:
        m = self.m if self.m is not None else self.n // 4
        if m > self.n // 2:
            raise ValueError(f"corner size {m} exceeds n/2 = {self.n // 2}")
        return m

    def principal(self) -> PrincipalFunction:
        return self.g if self.g is not None else principal_function(self.symbol)


@dataclass(frozen=True)
class TraceReport:
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    imag_residue: float
    jacobian_scale: float
    convergence: tuple


def model_pair(symbol: Symbol, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated self-adjoint pair (T_{Re f}, T_{Im f})."""
    return (toeplitz_matrix(symbol.real_part(), n),
            toeplitz_matrix(symbol.imag_part(), n))


def corner_trace(k: np.ndarray, m: int,
                 residue_rtol: float | None = IMAG_RESIDUE_RTOL) -> tuple[float, float]:
    """(real corner trace, imaginary residue) of the leading m x m block.

    The strict default residue_rtol fits the exact polynomial path; sampled
    test functions make phi(A,B) mildly non-self-adjoint at finite N, so
    those callers pass a loose sanity tolerance and report the residue.
    """
    diag = np.diag(k)[:m]
    total = complex(diag.sum())
    scale = max(float(np.abs(k).max()), 1e-300)
    residue = abs(total.imag)
    if residue_rtol is not None and residue > residue_rtol * scale * max(m, 1) + 1e-15:
        raise ArithmeticError(
            f"corner trace imaginary residue {residue:.3g} exceeds "
            f"{residue_rtol:.0e} * ||K|| * m = {residue_rtol * scale * m:.3g}")
    return float(total.real), residue


def lhs_corner_trace(cfg: TraceExperimentConfig, decs=None) -> float:
    """Corner trace of i [phi(A_N, B_N), psi(A_N, B_N)]."""
    m = cfg.corner()
    if decs is None:
        a, b = model_pair(cfg.symbol, cfg.n)
        decs = (decompose(a), decompose(b))
    da, db = decs
    f = funcalc(cfg.phi, da, db)
    g = funcalc(cfg.psi, da, db)
    k = 1j * (f @ g - g @ f)
    deg = cfg.symbol.degree
    poly_span = _combined_degree(cfg.phi, cfg.psi) * deg
    if poly_span and m >= cfg.n - poly_span:
        warnings.warn(
            f"corner {m} reaches within the boundary bandwidth {poly_span} of "
            f"n = {cfg.n}; polynomial exactness is not guaranteed", stacklevel=2)
    value, _ = corner_trace(k, m, _residue_rtol(cfg.phi, cfg.psi))
    return value


def _combined_degree(phi: Function2D, psi: Function2D) -> int:
    if phi.kind == "polynomial" and psi.kind == "polynomial":
        return sum(max(f.data.shape) - 1 for f in (phi, psi))
    return 0


def _residue_rtol(phi: Function2D, psi: Function2D) -> float:
    """Strict residue tolerance on the exact polynomial path, loose sanity
    cap for sampled/closed-form test functions (finite-N self-adjointness
    defect is genuine there and reported instead)."""
    if phi.kind == "polynomial" and psi.kind == "polynomial":
        return IMAG_RESIDUE_RTOL
    return 1e-3


def rhs_integral(phi: Function2D, psi: Function2D, g: PrincipalFunction,
                 resolution: int = 2048, box=None) -> tuple[float, float]:
    """Quadrature of (1/2pi) * Jacobian(phi, psi) * g over the support box.

    Returns (integral, jacobian_scale) where jacobian_scale is the same
    quadrature applied to |Jacobian| over the g-support region: the natural
    magnitude against which near-zero integrals should be judged.
    """
    if box is None:
        box = g.bounding_box()
    xmin, xmax, ymin, ymax = box
    xs = xmin + (xmax - xmin) * (np.arange(resolution) + 0.5) / resolution
    ys = ymin + (ymax - ymin) * (np.arange(resolution) + 0.5) / resolution
    cell = (xmax - xmin) * (ymax - ymin) / resolution ** 2
    jac = (phi.partial(1).eval_grid(xs, ys) * psi.partial(2).eval_grid(xs, ys)
           - phi.partial(2).eval_grid(xs, ys) * psi.partial(1).eval_grid(xs, ys))
    gvals = g.on_grid(xs, ys).T  # align to (x, y) indexing
    weighted = np.real(jac) * gvals
    integral = float(weighted.sum() * cell / (2.0 * np.pi))
    scale = float((np.abs(jac) * (gvals != 0)).sum() * cell / (2.0 * np.pi))
    return integral, scale


def trace_formula_experiment(cfg: TraceExperimentConfig) -> TraceReport:
    """Corner-trace left side vs principal-function right side, with a
    convergence table over (n, m) pairs."""
    g = cfg.principal()
    rhs, scale = rhs_integral(cfg.phi, cfg.psi, g, cfg.resolution)
    a, b = model_pair(cfg.symbol, cfg.n)
    da, db = decompose(a), decompose(b)
    f1 = funcalc(cfg.phi, da, db)
    f2 = funcalc(cfg.psi, da, db)
    k = 1j * (f1 @ f2 - f2 @ f1)
    rtol = _residue_rtol(cfg.phi, cfg.psi)
    lhs, residue = corner_trace(k, cfg.corner(), rtol)
    table = []
    for n in cfg.n_table:
        aa, bb = model_pair(cfg.symbol, n)
        dn = (decompose(aa), decompose(bb))
        g1 = funcalc(cfg.phi, *dn)
        g2 = funcalc(cfg.psi, *dn)
        kk = 1j * (g1 @ g2 - g2 @ g1)
        for frac in cfg.m_fractions:
            m = max(1, int(n * frac))
            val, _ = corner_trace(kk, m, rtol)
            table.append({"n": n, "m": m, "lhs": val, "abs_err": abs(val - rhs)})
    abs_err = abs(lhs - rhs)
    rel_err = abs_err / abs(rhs) if abs(rhs) > 1e-300 else float("inf")
    return TraceReport(lhs=lhs, rhs=rhs, abs_err=abs_err, rel_err=rel_err,
                       imag_residue=residue, jacobian_scale=scale,
                       convergence=tuple(table))


def polynomial_suite(n: int = 128, m: int | None = None, resolution: int = 2048):
    """The five-pair polynomial suite on the shift model.

    Pairs ((x, y), (x^2, y), (x, y^2), (x^2, y^2), (x^2, xy)) have exact
    right sides (1/2, 0, 0, 0, 1/4); corner traces are exact finite algebra
    at these sizes.  Returns a list of result dicts.
    """
    x = Function2D.polynomial([[0], [1]])
    y = Function2D.polynomial([[0, 1]])
    x2 = Function2D.polynomial([[0], [0], [1]])
    y2 = Function2D.polynomial([[0, 0, 1]])
    xy = Function2D.polynomial([[0, 0], [0, 1]])
    suite = [("x,y", x, y, 0.5), ("x^2,y", x2, y, 0.0), ("x,y^2", x, y2, 0.0),
             ("x^2,y^2", x2, y2, 0.0), ("x^2,xy", x2, xy, 0.25)]
    a, b = model_pair(SHIFT_SYMBOL, n)
    da, db = decompose(a), decompose(b)
    g = principal_function(SHIFT_SYMBOL)
    mm = m if m is not None else n // 4
    out = []
    for name, phi, psi, exact in suite:
        f1 = funcalc(phi, da, db)
        f2 = funcalc(psi, da, db)
        k = 1j * (f1 @ f2 - f2 @ f1)
        lhs, residue = corner_trace(k, mm)
        rhs, scale = rhs_integral(phi, psi, g, resolution)
        out.append({"pair": name, "lhs": lhs, "rhs": rhs, "exact": exact,
                    "lhs_err": abs(lhs - exact), "rhs_err": abs(rhs - exact),
                    "imag_residue": residue})
    return out


def band_additivity_check(cfg: TraceExperimentConfig, band_range=(-2, 2),
                          grid: UniformGrid | None = None):
    """Decompose phi and psi into dyadic bands and compare the band-pair sums
    of both sides with the totals (both sides are bilinear, so the band sums
    telescope; the left side telescopes exactly, the right side to quadrature
    accuracy)."""
    grid = grid or UniformGrid(dim=2, period=32.0 * np.pi, points=256)
    phi_s = cfg.phi.sample(grid)
    psi_s = cfg.psi.sample(grid)
    dec_phi = lp_decompose(phi_s.data, grid, band_range, warn=False)
    dec_psi = lp_decompose(psi_s.data, grid, band_range, warn=False)
    a, b = model_pair(cfg.symbol, cfg.n)
    da, db = decompose(a), decompose(b)
    m = cfg.corner()
    g = cfg.principal()

    # means are stripped by the band decomposition; add them back as a band
    mean_phi = Function2D.polynomial([[complex(np.mean(phi_s.data))]])
    mean_psi = Function2D.polynomial([[complex(np.mean(psi_s.data))]])
    bands_phi = {n: Function2D.sampled(v, grid) for n, v in dec_phi.bands.items()}
    bands_psi = {n: Function2D.sampled(v, grid) for n, v in dec_psi.bands.items()}
    bands_phi["mean"] = mean_phi
    bands_psi["mean"] = mean_psi

    f_phi = {key: funcalc(fn, da, db) for key, fn in bands_phi.items()}
    f_psi = {key: funcalc(fn, da, db) for key, fn in bands_psi.items()}
    lhs_bands = 0.0
    for fp in f_phi.values():
        for fq in f_psi.values():
            val, _ = corner_trace(1j * (fp @ fq - fq @ fp), m, None)
            lhs_bands += val
    fp_tot = funcalc(phi_s, da, db)
    fq_tot = funcalc(psi_s, da, db)
    lhs_total, _ = corner_trace(1j * (fp_tot @ fq_tot - fq_tot @ fp_tot), m, 1e-3)

    rhs_total, _ = rhs_integral(phi_s, psi_s, g, cfg.resolution)
    rhs_bands = 0.0
    for bp in bands_phi.values():
        for bq in bands_psi.values():
            val, _ = rhs_integral(bp, bq, g, cfg.resolution)
            rhs_bands += val
    return {"lhs_total": lhs_total, "lhs_band_sum": lhs_bands,
            "rhs_total": rhs_total, "rhs_band_sum": rhs_bands,
            "lhs_gap": abs(lhs_total - lhs_bands),
            "rhs_gap": abs(rhs_total - rhs_bands),
            "uncovered_phi": dec_phi.uncovered_mass,
            "uncovered_psi": dec_psi.uncovered_mass}


def gaussian_pair_in_disk(radius: float = 1.0, width: float | None = None,
                          offset: float = 0.1):
    """Two offset Gaussian bumps whose mass outside the disk is below 1e-12.

    Suitable test functions for components of the complement of a symbol
    curve.  Note that for such pairs the plane integral of their Jacobian
    vanishes identically, so both sides of the trace formula are zero
    whenever the principal function is constant on the disk; the pair is
    useful for verifying exactly that.
    """
    if width is None:
        # exp(-r^2 / w^2) falls below 1e-12 of its peak at r = w sqrt(27.6)
        width = (radius * (1.0 - offset * 3.5)) / np.sqrt(27.7)
    c = offset * radius
    phi = Function2D.closed_form(
        f"exp(-((x - {c!r})**2 + y**2) / {float(width) ** 2!r})")
    psi = Function2D.closed_form(
        f"exp(-(x**2 + (y - {c!r})**2) / {float(width) ** 2!r})")
    return phi, psi


# ---------------------------------------------------------------------------
# winding-factor experiment


def plateau_coordinate_pair(inner: float, outer: float,
                            grid: UniformGrid | None = None):
    """(x * chi(r), y * chi(r)) with a radial plateau chi = 1 for r <= inner.

    Sampled on a periodic grid; their Jacobian is exactly 1 on the plateau,
    so the pair straddles every jump curve of a principal function supported
    inside radius inner.
    """
    grid = grid or UniformGrid(dim=2, period=32.0 * np.pi, points=512)
    ax = grid.axis()
    xg, yg = np.meshgrid(ax, ax, indexing="ij")
    r = np.sqrt(xg ** 2 + yg ** 2)
    chi = plateau(r, inner, outer)
    phi = Function2D.sampled(xg * chi, grid)
    psi = Function2D.sampled(yg * chi, grid)
    return phi, psi


def winding_factor_experiment(symbol: Symbol, n_table=(128, 256, 512),
                              resolution: int = 1024, m_fraction: float = 0.25):
    """Measure the trace formula's sensitivity to the principal function's
    integer values.

    Test pair: coordinate functions under a radial plateau covering the
    symbol curve, so the Jacobian is 1 on supp g.  For each truncation size
    the corner trace is compared with the g-weighted quadrature (consistency)
    and with the flat quadrature (g replaced by the indicator of its
    support); the lhs / flat ratio measures the area-weighted mean of g, and
    equals the winding multiplicity when g is a single m-fold region.
    """
    g = principal_function(symbol)
    curve_radius = float(np.abs(symbol.curve()).max())
    phi, psi = plateau_coordinate_pair(curve_radius + 0.4, curve_radius + 1.6)
    box = g.bounding_box()
    rhs_true, _ = rhs_integral(phi, psi, g, resolution, box=box)
    xs = box[0] + (box[1] - box[0]) * (np.arange(resolution) + 0.5) / resolution
    ys = box[2] + (box[3] - box[2]) * (np.arange(resolution) + 0.5) / resolution
    gvals = g.on_grid(xs, ys)
    flat_vals = (gvals != 0).astype(np.int64)
    cell = (box[1] - box[0]) * (box[3] - box[2]) / resolution ** 2
    jac = np.real(phi.partial(1).eval_grid(xs, ys) * psi.partial(2).eval_grid(xs, ys)
                  - phi.partial(2).eval_grid(xs, ys) * psi.partial(1).eval_grid(xs, ys))
    rhs_flat = float((jac * flat_vals.T).sum() * cell / (2.0 * np.pi))
    rows = []
    for n in n_table:
        a, b = model_pair(symbol, n)
        da, db = decompose(a), decompose(b)
        f1 = funcalc(phi, da, db)
        f2 = funcalc(psi, da, db)
        k = 1j * (f1 @ f2 - f2 @ f1)
        lhs, _ = corner_trace(k, max(1, int(n * m_fraction)), 1e-3)
        rows.append({"n": n, "lhs": lhs, "ratio_flat": lhs / rhs_flat,
                     "err_true": abs(lhs - rhs_true)})
    return {"rhs_true": rhs_true, "rhs_flat": rhs_flat, "rows": rows}
