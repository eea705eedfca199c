"""Double operator integrals and Schur multiplier norm certificates.

In finite dimensions the double operator integral of Phi against the
spectral measures of A and B acts on T as a Hadamard (entrywise) multiplier
in the joint eigenbasis:

    U_A (Phi_hat o (U_A* T U_B)) U_B*,   Phi_hat[i, j] = Phi(lambda_i, mu_j).

The multiplier norm of a finite matrix Phi_hat is certified from both sides:
an upper bound from a positive semidefinite block witness
[[X, Phi_hat], [Phi_hat*, Y]] >= 0 with capped diagonals (any factorization
Phi_hat = P*Q yields one), and a lower bound from explicit contractions Z via
||Phi_hat o Z|| / ||Z||.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functions import Function1D, Function2D
from .rng import Xorshift64Star
from .spectral import as_decomposition


def _eval_grid(phi, xs, ys) -> np.ndarray:
    if isinstance(phi, Function2D):
        vals = phi.eval_grid(xs, ys)
    else:
        vals = np.asarray(phi(np.asarray(xs)[:, None], np.asarray(ys)[None, :]),
                          dtype=np.complex128)
    bad = ~np.isfinite(vals)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ValueError(
            f"integrand not evaluable at ({xs[i]:.6g}, {ys[j]:.6g})")
    return np.asarray(vals, dtype=np.complex128)


def double_operator_integral(phi, a, t, b) -> np.ndarray:
    """Hadamard-weighted spectral sum of phi against (E_A, E_B) applied to T."""
    da = as_decomposition(a)
    db = as_decomposition(b)
    t = np.asarray(t, dtype=np.complex128)
    if t.shape != (da.dim, db.dim):
        raise ValueError(f"T has shape {t.shape}, expected {(da.dim, db.dim)}")
    phi_hat = _eval_grid(phi, da.eigenvalues, db.eigenvalues)
    ua, ub = da.eigenvectors, db.eigenvectors
    return ua @ (phi_hat * (ua.conj().T @ t @ ub)) @ ub.conj().T


def funcalc(phi, a, b) -> np.ndarray:
    """The operator phi(A, B) = sum_ij phi(lambda_i, mu_j) P_i Q_j.

    For phi(x, y) = sum a_jk x^j y^k this reproduces sum a_jk A^j B^k (all
    A-powers to the left) even for noncommuting A and B.
    """
    da = as_decomposition(a)
    db = as_decomposition(b)
    eye = np.eye(da.dim, dtype=np.complex128)
    return double_operator_integral(phi, da, eye, db)


def scalar_calculus(f: Function1D, a) -> np.ndarray:
    """f(A) for a one-variable function via the eigendecomposition."""
    da = as_decomposition(a)
    vals = np.asarray(f(da.eigenvalues), dtype=np.complex128)
    u = da.eigenvectors
    return (u * vals) @ u.conj().T


def divided_difference_matrix(f: Function1D, xs, ys,
                              coincidence_tol: float | None = None) -> np.ndarray:
    """Matrix of (f(x_i) - f(y_j)) / (x_i - y_j), derivative near coincidence."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if coincidence_tol is None:
        diam = max(xs.max(), ys.max()) - min(xs.min(), ys.min())
        coincidence_tol = 1e-7 * max(diam, 1e-30)
    fx = np.asarray(f(xs), dtype=np.complex128)
    fy = np.asarray(f(ys), dtype=np.complex128)
    diff = xs[:, None] - ys[None, :]
    near = np.abs(diff) <= coincidence_tol
    safe = np.where(near, 1.0, diff)
    d = (fx[:, None] - fy[None, :]) / safe
    if near.any():
        fprime = f.derivative()
        mid = 0.5 * (xs[:, None] + ys[None, :])
        d = np.where(near, np.asarray(fprime(mid), dtype=np.complex128), d)
    return d


def one_var_commutator_identity(f: Function1D, a, b, q) -> float:
    """Residual of f(A)Q - Qf(B) = DOI(divided difference of f; A, AQ - QB, B).

    The identity is exact spectral algebra; the returned operator-norm
    residual measures only rounding error for exact function representations.
    """
    da = as_decomposition(a)
    db = as_decomposition(b)
    q = np.asarray(q, dtype=np.complex128)
    lhs = scalar_calculus(f, da) @ q - q @ scalar_calculus(f, db)
    amat = da.matrix()
    bmat = db.matrix()
    dd = divided_difference_matrix(f, da.eigenvalues, db.eigenvalues)
    ua, ub = da.eigenvectors, db.eigenvectors
    inner = ua.conj().T @ (amat @ q - q @ bmat) @ ub
    rhs = ua @ (dd * inner) @ ub.conj().T
    return float(np.linalg.norm(lhs - rhs, 2))


# ---------------------------------------------------------------------------
# Schur multiplier norm certificates


@dataclass(frozen=True)
class SchurMultiplierCertificate:
    """Two-sided certificate for the Hadamard multiplier norm of a matrix.

    lower comes from explicit contractions (always a valid lower bound);
    upper from a PSD block witness [[X, Phi], [Phi*, Y]] with diagonals
    <= upper (always a valid upper bound).  witness_min_eig records the
    most negative eigenvalue of the witness block (>= -1e-8 required).
    """

    matrix: np.ndarray
    upper: float
    lower: float
    gap: float
    witness_x: np.ndarray
    witness_y: np.ndarray
    witness_min_eig: float
    lower_witness: np.ndarray
    converged: bool

    def __post_init__(self):
        if self.lower > self.upper + 1e-9:
            raise AssertionError(
                f"certificate sandwich violated: lower {self.lower} > upper {self.upper}")


def _hadamard_ratio(phi: np.ndarray, z: np.ndarray) -> float:
    nz = np.linalg.norm(z, 2)
    if nz == 0:
        return 0.0
    return float(np.linalg.norm(phi * z, 2) / nz)


def _ascent_polish(phi: np.ndarray, z: np.ndarray, iters: int = 60) -> tuple[float, np.ndarray]:
    """Alternating maximization of ||Phi o Z|| over contractions Z.

    Each step is a certified evaluation, so the running best is always a
    valid lower bound; the iteration climbs to a local maximum.
    """
    best = _hadamard_ratio(phi, z)
    best_z = z / max(np.linalg.norm(z, 2), 1e-300)
    z = best_z
    for _ in range(iters):
        m = phi * z
        u, s, vh = np.linalg.svd(m)
        top_u = u[:, 0]
        top_v = vh[0, :].conj()
        w = np.conj(top_u)[:, None] * phi * top_v[None, :]
        uw, _, vwh = np.linalg.svd(np.conj(w), full_matrices=False)
        z_new = uw @ vwh
        r = _hadamard_ratio(phi, z_new)
        if r <= best + 1e-14:
            break
        best, best_z, z = r, z_new, z_new
    return best, best_z


def _lower_bound(phi: np.ndarray, n_random: int, seed: int) -> tuple[float, np.ndarray]:
    m, n = phi.shape
    best = 0.0
    best_z = np.zeros_like(phi)
    # coordinate patterns certify max |phi_ij|
    i, j = np.unravel_index(int(np.argmax(np.abs(phi))), phi.shape)
    z = np.zeros_like(phi)
    z[i, j] = 1.0
    best, best_z = np.abs(phi[i, j]), z
    # all +-1 rank-one sign patterns at small sizes (global sign fixed)
    if m + n <= 14:
        ss = np.array([[1 if (a >> k) & 1 else -1 for k in range(m)]
                       for a in range(2 ** (m - 1))], dtype=float)
        tt = np.array([[1 if (a >> k) & 1 else -1 for k in range(n)]
                       for a in range(2 ** n)], dtype=float)
        zs = ss[:, None, :, None] * tt[None, :, None, :]
        ratios = np.linalg.norm(phi[None, None] * zs, ord=2, axis=(2, 3)) / np.sqrt(m * n)
        a, b = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
        if ratios[a, b] > best:
            best = float(ratios[a, b])
            best_z = np.outer(ss[a], tt[b]) / np.sqrt(m * n)
    # random complex contractions
    rng = Xorshift64Star(seed)
    promising = [best_z]
    for _ in range(n_random):
        z = rng.contraction(m, n)
        r = _hadamard_ratio(phi, z)
        if r > best:
            best, best_z = r, z
            promising.append(z)
    # polish by alternating ascent: entrywise-phase start (all entries active),
    # a few random unitaries, and the most promising raw samples
    phase = np.conj(phi / np.maximum(np.abs(phi), 1e-300))
    starts = [phase] + [rng.unitary(max(m, n))[:m, :n] for _ in range(4)] + promising[-4:]
    for z0 in starts:
        r, z = _ascent_polish(phi, z0, iters=150)
        if r > best:
            best, best_z = r, z
    return float(best), best_z


def _witness_from_factorization(p: np.ndarray, q: np.ndarray):
    """Balanced PSD witness from Phi = P* Q; returns (X, Y, bound)."""
    x = p.conj().T @ p
    y = q.conj().T @ q
    dx = float(np.max(np.diag(x).real))
    dy = float(np.max(np.diag(y).real))
    if dx <= 0 or dy <= 0:
        return x, y, 0.0
    c = np.sqrt(dy / dx)
    return c * x, y / c, float(np.sqrt(dx * dy))


def _svd_witness(phi: np.ndarray):
    u, s, vh = np.linalg.svd(phi)
    r = s.shape[0]
    p = (np.sqrt(s)[:, None] * u.conj().T[:r, :])
    q = (np.sqrt(s)[:, None] * vh[:r, :])
    return _witness_from_factorization(p, q)


def _l1_witness(phi: np.ndarray):
    """Witness with X, Y diagonal: absolute row and column sums."""
    x = np.diag(np.abs(phi).sum(axis=1)).astype(np.complex128)
    y = np.diag(np.abs(phi).sum(axis=0)).astype(np.complex128)
    dx = float(np.max(np.diag(x).real))
    dy = float(np.max(np.diag(y).real))
    c = np.sqrt(dy / max(dx, 1e-300))
    return c * x, y / c, float(np.sqrt(dx * dy))


def _repair(phi: np.ndarray, x: np.ndarray, y: np.ndarray):
    """Turn approximate blocks into a rigorous witness by shifting with -lambda_min."""
    m, n = phi.shape
    block = np.zeros((m + n, m + n), dtype=np.complex128)
    block[:m, :m] = 0.5 * (x + x.conj().T)
    block[m:, m:] = 0.5 * (y + y.conj().T)
    block[:m, m:] = phi
    block[m:, :m] = phi.conj().T
    lam_min = float(np.linalg.eigvalsh(block)[0])
    shift = max(0.0, -lam_min)
    xr = block[:m, :m] + shift * np.eye(m)
    yr = block[m:, m:] + shift * np.eye(n)
    bound = float(max(np.max(np.diag(xr).real), np.max(np.diag(yr).real)))
    return xr, yr, bound, lam_min + shift


def _dykstra_feasibility(phi: np.ndarray, t: float, x0, y0, max_iter: int,
                         feas_tol: float):
    """Dykstra alternating projections between the PSD cone and the affine set
    {off-diagonal block = Phi, diagonal <= t}.  Returns repaired witness data."""
    m, n = phi.shape
    d = m + n

    def proj_affine(mat):
        out = 0.5 * (mat + mat.conj().T)
        out[:m, m:] = phi
        out[m:, :m] = phi.conj().T
        dg = np.minimum(np.diag(out).real, t)
        out[np.arange(d), np.arange(d)] = dg
        return out

    def proj_psd(mat):
        w, v = np.linalg.eigh(0.5 * (mat + mat.conj().T))
        w = np.maximum(w, 0.0)
        return (v * w) @ v.conj().T

    x = np.zeros((d, d), dtype=np.complex128)
    x[:m, :m] = x0
    x[m:, m:] = y0
    x = proj_affine(x)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    scale = max(np.linalg.norm(phi), 1e-300)
    for _ in range(max_iter):
        y = proj_psd(x + p)
        p = x + p - y
        x_new = proj_affine(y + q)
        q = y + q - x_new
        drift = np.linalg.norm(x_new - x)
        x = x_new
        if drift <= 0.05 * feas_tol * scale and np.linalg.norm(x - y) <= feas_tol * scale:
            break
    return _repair(phi, x[:m, :m], x[m:, m:])


def schur_multiplier_norm(phi_hat, tol: float = 1e-6, max_iter: int = 5000,
                          n_random: int = 200, seed: int = 7,
                          factorizations=()) -> SchurMultiplierCertificate:
    """Certified Hadamard multiplier norm of a finite matrix.

    The upper bound is the best PSD block witness found among: an exact
    balanced-SVD factorization, any caller-supplied factorizations (pairs
    (P, Q) with Phi = P* Q), and a bisection refined by Dykstra alternating
    projections with the iteration budget max_iter.  The lower bound samples
    coordinate and sign-pattern contractions, n_random random contractions,
    and polishes by alternating ascent.  gap = upper - lower; converged is
    set when the gap is within tol.
    """
    phi = np.asarray(phi_hat, dtype=np.complex128)
    if phi.ndim != 2:
        raise ValueError("expected a matrix")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not np.all(np.isfinite(phi)):
        raise ValueError("matrix has non-finite entries")
    scale = float(np.abs(phi).max())
    if scale == 0.0:
        z = np.zeros_like(phi)
        return SchurMultiplierCertificate(phi, 0.0, 0.0, 0.0, z @ z.conj().T,
                                          z.conj().T @ z, 0.0, z, True)

    lower, lower_z = _lower_bound(phi, n_random, seed)

    best_x, best_y, best_upper = _svd_witness(phi)
    for x, y, bound in (_l1_witness(phi),):
        if bound < best_upper:
            best_x, best_y, best_upper = x, y, bound
    for p, q in factorizations:
        p = np.asarray(p, dtype=np.complex128)
        q = np.asarray(q, dtype=np.complex128)
        if np.linalg.norm(p.conj().T @ q - phi) > 1e-8 * max(scale, 1.0):
            raise ValueError("supplied factorization does not reproduce the matrix")
        x, y, bound = _witness_from_factorization(p, q)
        if bound < best_upper:
            best_x, best_y, best_upper = x, y, bound

    # bisection with Dykstra only if the cheap witnesses leave a gap
    if best_upper - lower > tol:
        lo = max(lower, tol)
        hi = best_upper
        feas_tol = 1e-9
        steps = int(np.ceil(np.log2(max((hi - lo) / tol, 2.0)))) + 4
        warm_x, warm_y = best_x, best_y
        for _ in range(steps):
            if hi - lo <= 0.25 * tol:
                break
            mid = 0.5 * (lo + hi)
            xr, yr, bound, _ = _dykstra_feasibility(
                phi, mid, warm_x, warm_y, max_iter, feas_tol)
            if bound < best_upper:
                best_x, best_y, best_upper = xr, yr, bound
            if bound <= mid + max(0.1 * tol, 1e-3 * (hi - lo)):
                hi = min(bound, mid)
                warm_x, warm_y = xr, yr
            else:
                lo = mid

    m, n = phi.shape
    block = np.zeros((m + n, m + n), dtype=np.complex128)
    block[:m, :m] = best_x
    block[m:, m:] = best_y
    block[:m, m:] = phi
    block[m:, :m] = phi.conj().T
    min_eig = float(np.linalg.eigvalsh(block)[0])
    upper = max(best_upper, lower)
    gap = upper - lower
    return SchurMultiplierCertificate(
        matrix=phi, upper=upper, lower=lower, gap=gap,
        witness_x=best_x, witness_y=best_y, witness_min_eig=min_eig,
        lower_witness=lower_z, converged=bool(gap <= tol))


# ---------------------------------------------------------------------------
# projective decompositions of trigonometric polynomials


@dataclass(frozen=True)
class TrigProjectiveRows:
    """Row decomposition f(x, y) = sum_j e^{ijx} g_j(y) of a trig polynomial.

    bound is the projective norm estimate sum_j sup|g_j| (grid sup); it never
    exceeds (1 + 2N) sup|f|.
    """

    degree: int
    coeffs: np.ndarray
    row_sups: np.ndarray
    bound: float
    sup_f: float

    def row(self, j: int) -> np.ndarray:
        """Fourier coefficients (k = -N..N) of g_j."""
        return self.coeffs[j + self.degree]

    def evaluate(self, x, y) -> np.ndarray:
        ns = np.arange(-self.degree, self.degree + 1)
        ex = np.exp(1j * np.multiply.outer(np.asarray(x, dtype=float), ns))
        ey = np.exp(1j * np.multiply.outer(np.asarray(y, dtype=float), ns))
        return np.einsum("...j,jk,...k->...", ex, self.coeffs, ey)

    def factorization(self, xs, ys) -> tuple[np.ndarray, np.ndarray]:
        """Balanced (P, Q) with sampled matrix f(xs_i, ys_j) = P* Q."""
        ns = np.arange(-self.degree, self.degree + 1)
        sups = np.maximum(self.row_sups, 1e-300)
        ex = np.exp(1j * np.outer(ns, np.asarray(xs, dtype=float)))
        p = np.sqrt(sups)[:, None] * np.conj(ex)
        gy = self.coeffs @ np.exp(1j * np.outer(ns, np.asarray(ys, dtype=float)))
        q = gy / np.sqrt(sups)[:, None]
        return p, q


def projective_decompose_trig(coeffs, sup_points: int = 4096) -> TrigProjectiveRows:
    """Split a 2-variable trig polynomial into one-variable rows.

    coeffs is the (2N+1) x (2N+1) matrix of Fourier coefficients f_hat(j, k),
    indices j + N, k + N.  Row j is g_j(y) = sum_k f_hat(j, k) e^{iky}; the
    projective bound sum_j sup|g_j| is certified against (1 + 2N) sup|f|.
    """
    c = np.asarray(coeffs, dtype=np.complex128)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] % 2 == 0:
        raise ValueError("coefficients must form a (2N+1) x (2N+1) matrix")
    deg = c.shape[0] // 2
    ys = np.linspace(0.0, 2.0 * np.pi, sup_points, endpoint=False)
    ns = np.arange(-deg, deg + 1)
    ey = np.exp(1j * np.outer(ns, ys))
    rows = c @ ey
    row_sups = np.abs(rows).max(axis=1)
    bound = float(row_sups.sum())
    side = min(sup_points, 512)
    xs = np.linspace(0.0, 2.0 * np.pi, side, endpoint=False)
    ex = np.exp(1j * np.outer(xs, ns))
    vals = ex @ c @ np.exp(1j * np.outer(ns, xs))
    sup_f = float(np.abs(vals).max())
    if bound > (1 + 2 * deg) * sup_f * (1 + 1e-9) + 1e-12:
        raise AssertionError(
            f"projective bound {bound:.6g} exceeds (1+2N) sup|f| = "
            f"{(1 + 2 * deg) * sup_f:.6g}")
    return TrigProjectiveRows(degree=deg, coeffs=c, row_sups=row_sups,
                              bound=bound, sup_f=sup_f)
