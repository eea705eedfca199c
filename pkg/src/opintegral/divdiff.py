"""Divided differences of two-variable functions and their structured
representations.

For phi differentiable in x, the first divided difference is

    (x1, x2, y) -> (phi(x1, y) - phi(x2, y)) / (x1 - x2),

with the partial derivative on the diagonal.  Two constructive routes turn
it into a representation a triple operator integral can consume:

* band-limited phi (spectrum in a ball of radius sigma): sample on the
  lattice j pi / sigma against shifted sinc factors; the doubly-indexed
  factor is the lattice sample matrix of divided differences, and the
  identity sum_j sinc^2(x - j pi) = 1 keeps the sinc column norms at 1.
* polynomial phi: an exact finite decomposition obtained by telescoping
  x1^j - x2^j, with no truncation tail at all.

A function with finite dyadic-band norm is handled band by band: each
Littlewood-Paley piece is band-limited with sigma_n = 2^(n+1), so the band
representations sum to a representation of the whole divided difference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .besov import DEFAULT_GRID_2D, bandlimit_check, lp_decompose
from .functions import Function2D, UniformGrid
from .toi import HaagerupRep, rep_norm_certificate


@dataclass(frozen=True)
class DividedDifference:
    """Callable divided difference with a diagonal (derivative) convention.

    coincidence_tol None means 1e-7 times the span of the same-axis
    arguments of each call (the spectral diameter when evaluated on spectra).
    """

    source: Function2D
    axis: int
    coincidence_tol: float | None
    _partial: Function2D = field(repr=False, default=None)

    def _tol(self, u, v) -> float:
        if self.coincidence_tol is not None:
            return self.coincidence_tol
        span = max(float(np.max(u)), float(np.max(v))) - \
            min(float(np.min(u)), float(np.min(v)))
        return 1e-7 * max(span, 1e-300)

    def __call__(self, u, v, w):
        """axis 1: arguments (x1, x2, y); axis 2: arguments (x, y1, y2)."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        if self.axis == 1:
            x1, x2, y = np.broadcast_arrays(u, v, w)
            tol = self._tol(x1, x2)
            diff = x1 - x2
            near = np.abs(diff) <= tol
            safe = np.where(near, 1.0, diff)
            vals = (self.source(x1, y) - self.source(x2, y)) / safe
            if near.any():
                vals = np.where(near, self._partial(0.5 * (x1 + x2), y), vals)
            return vals
        x, y1, y2 = np.broadcast_arrays(u, v, w)
        tol = self._tol(y1, y2)
        diff = y1 - y2
        near = np.abs(diff) <= tol
        safe = np.where(near, 1.0, diff)
        vals = (self.source(x, y1) - self.source(x, y2)) / safe
        if near.any():
            vals = np.where(near, self._partial(x, 0.5 * (y1 + y2)), vals)
        return vals


def divided_difference(phi: Function2D, axis: int,
                       coincidence_tol: float | None = None) -> DividedDifference:
    """Divided difference of phi along axis 1 (x) or 2 (y).

    Below the coincidence tolerance (default: 1e-7 times the argument span)
    the quotient switches to the exact (polynomial, closed-form, product) or
    spectral (sampled) partial derivative.
    """
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    return DividedDifference(source=phi, axis=axis,
                             coincidence_tol=coincidence_tol,
                             _partial=phi.partial(axis))


# ---------------------------------------------------------------------------
# sinc-lattice representations for band-limited functions


def sinc_partition_deficit(x, j_max: int) -> np.ndarray:
    """1 - sum_{|j| <= J} sinc^2(x/pi - j); decays like 1/J."""
    x = np.asarray(x, dtype=float)
    js = np.arange(-j_max, j_max + 1)
    s = np.sinc(x[..., None] / np.pi - js)
    return 1.0 - (s * s).sum(axis=-1)


@dataclass(frozen=True)
class SincRep:
    """Sinc-sampling representation of a divided difference.

    The lattice is j pi / sigma, |j| <= J.  rep is first_kind for axis 1
    (doubly-indexed lattice samples as functions of y) and second_kind for
    axis 2.  delta_norm is the measured sup (over probe points) operator
    norm of the lattice sample matrix; tail_bound is the recorded truncation
    bound, valid for evaluation points within domain_radius.
    """

    sigma: float
    j_max: int
    axis: int
    lattice: np.ndarray
    rep: HaagerupRep
    delta_norm: float
    tail_bound: float
    domain_radius: float


def _lattice_divided_samples(phi: Function2D, axis: int, lattice: np.ndarray,
                             points: np.ndarray) -> np.ndarray:
    """(npts, J, J) array of lattice divided differences at the given points."""
    step = lattice[1] - lattice[0] if lattice.size > 1 else 1.0
    if axis == 1:
        vals = phi.eval_grid(lattice, points)          # (J, npts)
        dvals = phi.partial(1).eval_grid(lattice, points)
    else:
        vals = phi.eval_grid(points, lattice).T        # (J, npts)
        dvals = phi.partial(2).eval_grid(points, lattice).T
    diff = lattice[:, None] - lattice[None, :]
    safe = np.where(np.abs(diff) < 0.5 * step, 1.0, diff)
    out = (vals[:, None, :] - vals[None, :, :]) / safe[:, :, None]
    idx = np.arange(lattice.size)
    out[idx, idx, :] = dvals
    return np.moveaxis(out, 2, 0)


def sinc_representation(phi: Function2D, axis: int, sigma: float, j_max: int = 256,
                        domain_radius: float | None = None,
                        check_grid: UniformGrid | None = None,
                        skip_bandlimit_check: bool = False) -> SincRep:
    """Sinc-sampling representation of the divided difference of phi.

    phi must be band-limited to |xi| <= sigma (checked on a sampling grid
    unless skip_bandlimit_check).  The recorded tail_bound combines the
    measured sample-matrix norm with the sinc l^2 tail outside |j| <= J,
    so evaluations inside domain_radius agree with the divided difference
    to within it.
    """
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    if sigma <= 0:
        raise ValueError("band radius must be positive")
    if not skip_bandlimit_check:
        if phi.kind == "sampled":
            samples, grid = phi.data, phi.grid
        else:
            grid = check_grid or DEFAULT_GRID_2D
            samples = phi.sample(grid).data
        ok, leakage = bandlimit_check(samples, grid, sigma)
        if not ok:
            raise ValueError(
                f"function is not band-limited to {sigma:g}: relative spectral "
                f"leakage {leakage:.3g}")
    step = np.pi / sigma
    lattice = step * np.arange(-j_max, j_max + 1)
    if domain_radius is None:
        domain_radius = 0.5 * lattice[-1]

    def sinc_factor(j):
        return lambda x, j=j: np.sinc(sigma * np.asarray(x, dtype=float) / np.pi - j)

    singles = [sinc_factor(j) for j in range(-j_max, j_max + 1)]

    def double(points):
        return _lattice_divided_samples(phi, axis, lattice, np.asarray(points, dtype=float))

    # measured operator norm of the sample matrix at probe points
    probes = np.linspace(-domain_radius, domain_radius, 5)
    dn = _measured_double_norm(double, probes)

    slack = max(j_max - sigma * domain_radius / np.pi - 1.0, 0.5)
    tail = 3.0 * max(dn, 1e-300) * np.sqrt(2.0) / (np.pi * np.sqrt(slack))

    if axis == 1:
        rep = HaagerupRep(kind="first_kind", left=singles, mid=list(singles),
                          double=double, shape=(len(singles), len(singles)),
                          tail_bound=tail, meta={"sigma": sigma, "j_max": j_max})
    else:
        rep = HaagerupRep(kind="second_kind", double=double, mid=singles,
                          right=list(singles), shape=(len(singles), len(singles)),
                          tail_bound=tail, meta={"sigma": sigma, "j_max": j_max})
    return SincRep(sigma=sigma, j_max=j_max, axis=axis, lattice=lattice, rep=rep,
                   delta_norm=dn, tail_bound=tail, domain_radius=float(domain_radius))


def _measured_double_norm(double, probes: np.ndarray) -> float:
    slices = np.asarray(double(probes), dtype=np.complex128)
    return float(max(np.linalg.norm(slices[p], 2) for p in range(slices.shape[0])))


# ---------------------------------------------------------------------------
# exact representations for polynomials


def polynomial_dd_projective(phi: Function2D, axis: int) -> HaagerupRep:
    """Exact projective representation of the divided difference of a polynomial.

    Telescoping x1^j - x2^j = (x1 - x2) sum_l x1^l x2^(j-1-l) gives, for
    axis 1, the finite sum over (l, m, k) of x1^l x2^m (a_{l+m+1,k} y^k).
    """
    if phi.kind != "polynomial":
        raise ValueError("exact path expects a polynomial")
    a = phi.data
    left, mid, right = [], [], []

    def power(p):
        return lambda x, p=p: np.asarray(x, dtype=np.complex128) ** p

    def poly_factor(coeffs):
        c = np.asarray(coeffs, dtype=np.complex128)
        return lambda x, c=c: np.polynomial.polynomial.polyval(np.asarray(x), c)

    if axis == 1:
        dj, dk = a.shape
        for l in range(dj - 1):
            for m in range(dj - 1 - l):
                coeffs = a[l + m + 1, :]
                if not np.any(coeffs):
                    continue
                left.append(power(l))
                mid.append(power(m))
                right.append(poly_factor(coeffs))
    else:
        dj, dk = a.shape
        for l in range(dk - 1):
            for m in range(dk - 1 - l):
                coeffs = a[:, l + m + 1]
                if not np.any(coeffs):
                    continue
                left.append(poly_factor(coeffs))
                mid.append(power(l))
                right.append(power(m))
    if not left:
        zero = lambda x: np.zeros(np.shape(x), dtype=np.complex128)
        left, mid, right = [zero], [zero], [zero]
    return HaagerupRep(kind="projective", left=left, mid=mid, right=right,
                       meta={"exact": True, "axis": axis})


def polynomial_dd_rep(phi: Function2D, axis: int) -> HaagerupRep:
    """Exact kind-structured representation of a polynomial divided difference.

    axis 1 gives a first_kind representation with alpha_l = x1^l,
    beta_m = x2^m and gamma_{lm}(y) = sum_k a_{l+m+1,k} y^k; axis 2 the
    symmetric second_kind one.
    """
    if phi.kind != "polynomial":
        raise ValueError("exact path expects a polynomial")
    a = phi.data

    def power(p):
        return lambda x, p=p: np.asarray(x, dtype=np.complex128) ** p

    if axis == 1:
        dj = a.shape[0]
        n_idx = max(dj - 1, 1)
        coeff_table = a[1:, :] if dj > 1 else np.zeros((1, a.shape[1]))

        def double(points):
            pts = np.asarray(points, dtype=float)
            out = np.zeros((pts.size, n_idx, n_idx), dtype=np.complex128)
            for l in range(n_idx):
                for m in range(n_idx - l):
                    c = coeff_table[l + m] if l + m < coeff_table.shape[0] else None
                    if c is None or not np.any(c):
                        continue
                    out[:, l, m] = np.polynomial.polynomial.polyval(pts, c)
            return out

        singles = [power(p) for p in range(n_idx)]
        return HaagerupRep(kind="first_kind", left=singles, mid=list(singles),
                           double=double, shape=(n_idx, n_idx),
                           meta={"exact": True, "axis": axis})
    dk = a.shape[1]
    n_idx = max(dk - 1, 1)
    coeff_table = a[:, 1:] if dk > 1 else np.zeros((a.shape[0], 1))

    def double(points):
        pts = np.asarray(points, dtype=float)
        out = np.zeros((pts.size, n_idx, n_idx), dtype=np.complex128)
        for l in range(n_idx):
            for m in range(n_idx - l):
                if l + m >= coeff_table.shape[1]:
                    continue
                c = coeff_table[:, l + m]
                if not np.any(c):
                    continue
                out[:, l, m] = np.polynomial.polynomial.polyval(pts, c)
        return out

    singles = [power(p) for p in range(n_idx)]
    return HaagerupRep(kind="second_kind", double=double, mid=singles,
                       right=list(singles), shape=(n_idx, n_idx),
                       meta={"exact": True, "axis": axis})


# ---------------------------------------------------------------------------
# dyadic-band assembly


@dataclass(frozen=True)
class BandRepList:
    """Per-band sinc representations of a divided difference.

    items maps band index n to its SincRep (band radius 2^(n+1)); the
    aggregate certificate is the sum of per-band certificates, reported next
    to the dyadic-band norm of the source.
    """

    axis: int
    items: dict
    grid: UniformGrid
    uncovered_mass: float

    def aggregate_certificate(self, s1, s2, s3) -> float:
        total = 0.0
        for n in sorted(self.items):
            total += rep_norm_certificate(self.items[n].rep, s1, s2, s3).value
        return total


def besov_representation(phi: Function2D, axis: int,
                         band_range: tuple[int, int] | None = None,
                         j_max: int = 256, grid: UniformGrid | None = None,
                         domain_radius: float | None = None,
                         band_tol: float = 1e-12) -> BandRepList:
    """Split phi into dyadic bands and represent each band by sinc sampling.

    Polynomials have zero band content (their dyadic norm vanishes modulo
    polynomials) and return an empty list; use the exact polynomial path
    instead.  Bands whose sup norm falls below band_tol relative to the
    largest band are dropped as numerically zero.
    """
    if axis not in (1, 2):
        raise ValueError("axis must be 1 or 2")
    if phi.kind == "polynomial":
        return BandRepList(axis=axis, items={}, grid=grid or DEFAULT_GRID_2D,
                           uncovered_mass=0.0)
    grid = grid or (phi.grid if phi.kind == "sampled" else DEFAULT_GRID_2D)
    sampled = phi.sample(grid)
    # uncovered spectral mass is carried on the result instead of warning
    dec = lp_decompose(sampled.data, grid, band_range, warn=False)
    peak = max(dec.sup_norms.values(), default=0.0)
    items = {}
    for n in sorted(dec.bands):
        if dec.sup_norms[n] <= band_tol * max(peak, 1e-300):
            continue
        band_fn = Function2D.sampled(dec.bands[n], grid)
        items[n] = sinc_representation(band_fn, axis, sigma=2.0 ** (n + 1),
                                       j_max=j_max, domain_radius=domain_radius,
                                       skip_bandlimit_check=True)
    return BandRepList(axis=axis, items=items, grid=grid,
                       uncovered_mass=dec.uncovered_mass)
