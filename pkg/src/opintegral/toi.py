"""Triple operator integrals in finite dimensions.

A three-variable integrand Psi acts on a pair (T, R) through the spectral
measures of three Hermitian operators:

    W = sum_{i,j,k} Psi(lambda_i, mu_j, nu_k)  P_i T Q_j R S_k.

Besides this direct spectral sum, Psi may be given by a structured
representation: projective (sum of one-variable products), Haagerup
(doubly-indexed middle factor), or the first/second-kind variants that move
the doubly-indexed family to the last/first slot.  In finite dimensions
every kind evaluates to the same operator; the kinds differ in which norm
certificates they carry: the Haagerup kind bounds the operator norm of W by
(representation norm) * ||T|| * ||R||, the first kind bounds ||W||_S1 with
||T||_S1 * ||R||, and the second kind with ||T|| * ||R||_S1.

Sums run in fixed ascending index order with compensated (Kahan)
accumulation, so results are reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import as_decomposition, schatten_norm


def _eval_factor(f, points: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(points), dtype=np.complex128)
    if vals.shape != points.shape:
        vals = np.broadcast_to(vals, points.shape).astype(np.complex128)
    return vals


def _eval_factor_list(factors, points: np.ndarray) -> np.ndarray:
    """Stack factor evaluations into a (len(factors), npts) matrix."""
    return np.array([_eval_factor(f, points) for f in factors])


@dataclass
class HaagerupRep:
    """A structured representation of a three-variable integrand.

    kind "projective": left/mid/right are equal-length factor lists and the
    integrand is sum_n left_n(x1) mid_n(x2) right_n(x3).

    kind "haagerup": left = {alpha_j}, right = {gamma_k}, double(points) ->
    (npts, J, K) evaluates the middle family beta_jk.

    kind "first_kind": left = {alpha_j}, mid = {beta_k}, double = gamma_jk
    of the third variable.  kind "second_kind": double = alpha_jk of the
    first variable, mid = {beta_j}, right = {gamma_k}.

    tail_bound documents the truncation error of the producer (zero for
    exact finite representations).
    """

    kind: str
    left: list | None = None
    mid: list | None = None
    right: list | None = None
    double: object | None = None
    shape: tuple[int, int] = (0, 0)
    tail_bound: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("projective", "haagerup", "first_kind", "second_kind"):
            raise ValueError(f"unknown representation kind {self.kind!r}")
        if self.kind == "projective":
            if not (self.left and self.mid and self.right) or not (
                    len(self.left) == len(self.mid) == len(self.right)):
                raise ValueError("projective representation needs three equal-length factor lists")
        elif self.double is None:
            raise ValueError(f"{self.kind} representation needs a doubly-indexed factor")

    def evaluate(self, x1, x2, x3) -> np.ndarray:
        """Pointwise value of the represented integrand (broadcasting).

        Doubly-indexed factors are evaluated in chunks of points so that the
        (npts, J, K) slices stay within a fixed memory budget.
        """
        x1, x2, x3 = np.broadcast_arrays(np.asarray(x1, dtype=float),
                                         np.asarray(x2, dtype=float),
                                         np.asarray(x3, dtype=float))
        flat = [np.ravel(v) for v in (x1, x2, x3)]
        if self.kind == "projective":
            out = np.zeros(flat[0].shape, dtype=np.complex128)
            comp = np.zeros_like(out)
            for f, g, h in zip(self.left, self.mid, self.right):
                term = _eval_factor(f, flat[0]) * _eval_factor(g, flat[1]) \
                    * _eval_factor(h, flat[2])
                out, comp = _kahan(out, comp, term)
            return out.reshape(x1.shape)
        npts = flat[0].size
        jk = max(int(np.prod(self.shape)), 1)
        chunk = max(1, (1 << 23) // jk)
        vals = np.empty(npts, dtype=np.complex128)
        for start in range(0, npts, chunk):
            sl = slice(start, min(start + chunk, npts))
            if self.kind == "haagerup":
                a = _eval_factor_list(self.left, flat[0][sl])
                c = _eval_factor_list(self.right, flat[2][sl])
                d = np.asarray(self.double(flat[1][sl]), dtype=np.complex128)
                vals[sl] = np.einsum("jp,pjk,kp->p", a, d, c)
            elif self.kind == "first_kind":
                a = _eval_factor_list(self.left, flat[0][sl])
                b = _eval_factor_list(self.mid, flat[1][sl])
                d = np.asarray(self.double(flat[2][sl]), dtype=np.complex128)
                vals[sl] = np.einsum("jp,kp,pjk->p", a, b, d)
            else:
                b = _eval_factor_list(self.mid, flat[1][sl])
                c = _eval_factor_list(self.right, flat[2][sl])
                d = np.asarray(self.double(flat[0][sl]), dtype=np.complex128)
                vals[sl] = np.einsum("pjk,jp,kp->p", d, b, c)
        return vals.reshape(x1.shape)


@dataclass(frozen=True)
class RepNormCertificate:
    """Product of the three factor norms of a representation on given spectra.

    An upper bound for the corresponding tensor norm (which is an infimum
    over representations).
    """

    kind: str
    value: float
    factor_norms: tuple[float, float, float]


def _kahan(total, comp, term):
    y = term - comp
    t = total + y
    comp = (t - total) - y
    return t, comp


def _column_norm(factors, points: np.ndarray) -> float:
    """sup over points of the l^2 norm of the factor column."""
    mat = _eval_factor_list(factors, points)
    return float(np.sqrt((np.abs(mat) ** 2).sum(axis=0)).max())


def _top_singular(m: np.ndarray, iters: int = 40) -> float:
    """Largest singular value by power iteration on M*M (cheap for wide J x K)."""
    rng = np.random.default_rng(0)
    v = rng.standard_normal(m.shape[1]) + 1j * rng.standard_normal(m.shape[1])
    v /= np.linalg.norm(v)
    s = 0.0
    for _ in range(iters):
        w = m @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = m.conj().T @ (w / nw)
        s_new = np.linalg.norm(v)
        v = v / s_new
        if abs(s_new - s) <= 1e-12 * max(s_new, 1.0):
            s = s_new
            break
        s = s_new
    return float(s)


def _double_norm(double, points: np.ndarray, exact: bool = False) -> float:
    """sup over points of the operator norm of the (J, K) slice."""
    slices = np.asarray(double(points), dtype=np.complex128)
    best = 0.0
    for p in range(slices.shape[0]):
        m = slices[p]
        val = np.linalg.norm(m, 2) if (exact or min(m.shape) <= 64) else _top_singular(m)
        best = max(best, float(val))
    return best


def rep_norm_certificate(rep: HaagerupRep, s1, s2, s3) -> RepNormCertificate:
    """Factor-norm product of rep on spectra (s1, s2, s3)."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    s3 = np.asarray(s3, dtype=float)
    if rep.kind == "projective":
        mats = [_eval_factor_list(rep.left, s1), _eval_factor_list(rep.mid, s2),
                _eval_factor_list(rep.right, s3)]
        sups = [np.abs(m).max(axis=1) for m in mats]
        value = float(np.sum(sups[0] * sups[1] * sups[2]))
        return RepNormCertificate("projective", value,
                                  (float(sups[0].max()), float(sups[1].max()),
                                   float(sups[2].max())))
    if rep.kind == "haagerup":
        norms = (_column_norm(rep.left, s1), _double_norm(rep.double, s2),
                 _column_norm(rep.right, s3))
    elif rep.kind == "first_kind":
        norms = (_column_norm(rep.left, s1), _column_norm(rep.mid, s2),
                 _double_norm(rep.double, s3))
    else:
        norms = (_double_norm(rep.double, s1), _column_norm(rep.mid, s2),
                 _column_norm(rep.right, s3))
    return RepNormCertificate(rep.kind, float(np.prod(norms)), tuple(float(v) for v in norms))


def triple_spectral_sum(psi, a, b, c, t, r) -> np.ndarray:
    """Direct spectral realization sum_ijk Psi(lambda_i, mu_j, nu_k) P_i T Q_j R S_k."""
    da, db, dc = as_decomposition(a), as_decomposition(b), as_decomposition(c)
    t = np.asarray(t, dtype=np.complex128)
    r = np.asarray(r, dtype=np.complex128)
    if t.shape != (da.dim, db.dim) or r.shape != (db.dim, dc.dim):
        raise ValueError("operator shapes incompatible with the spectra")
    la, mu, nu = da.eigenvalues, db.eigenvalues, dc.eigenvalues
    if isinstance(psi, HaagerupRep):
        vals = psi.evaluate(la[:, None, None], mu[None, :, None], nu[None, None, :])
    else:
        vals = np.asarray(psi(la[:, None, None], mu[None, :, None], nu[None, None, :]),
                          dtype=np.complex128)
    bad = ~np.isfinite(vals)
    if bad.any():
        i, j, k = np.argwhere(bad)[0]
        raise ValueError(
            f"integrand not evaluable at ({la[i]:.6g}, {mu[j]:.6g}, {nu[k]:.6g})")
    tp = da.eigenvectors.conj().T @ t @ db.eigenvectors
    rp = db.eigenvectors.conj().T @ r @ dc.eigenvectors
    out = np.zeros((da.dim, dc.dim), dtype=np.complex128)
    comp = np.zeros_like(out)
    for j in range(db.dim):
        term = vals[:, j, :] * np.outer(tp[:, j], rp[j, :])
        out, comp = _kahan(out, comp, term)
    return da.eigenvectors @ out @ dc.eigenvectors.conj().T


def eval_representation(rep: HaagerupRep, a, t, b, r, c) -> np.ndarray:
    """Evaluate the triple operator integral of a structured representation.

    In finite dimensions all kinds reduce to the same absolutely convergent
    double sum, evaluated here factor-by-factor in the joint eigenbases
    (ascending j then k, compensated accumulation); first/second kinds agree
    with their trace-duality definitions, see eval_via_trace_duality.
    """
    da, db, dc = as_decomposition(a), as_decomposition(b), as_decomposition(c)
    t = np.asarray(t, dtype=np.complex128)
    r = np.asarray(r, dtype=np.complex128)
    if t.shape != (da.dim, db.dim) or r.shape != (db.dim, dc.dim):
        raise ValueError("operator shapes incompatible with the spectra")
    la, mu, nu = da.eigenvalues, db.eigenvalues, dc.eigenvalues
    ua, ub, uc = da.eigenvectors, db.eigenvectors, dc.eigenvectors
    tp = ua.conj().T @ t @ ub
    rp = ub.conj().T @ r @ uc
    out = np.zeros((da.dim, dc.dim), dtype=np.complex128)
    comp = np.zeros_like(out)

    if rep.kind == "projective":
        for f, g, h in zip(rep.left, rep.mid, rep.right):
            fa = _eval_factor(f, la)
            gb = _eval_factor(g, mu)
            hc = _eval_factor(h, nu)
            term = (fa[:, None] * tp) @ (gb[:, None] * rp) * hc[None, :]
            out, comp = _kahan(out, comp, term)
    elif rep.kind == "haagerup":
        amat = _eval_factor_list(rep.left, la)          # (J, n1)
        cmat = _eval_factor_list(rep.right, nu)         # (K, n3)
        dmat = np.asarray(rep.double(mu), dtype=np.complex128)  # (n2, J, K)
        for m in range(db.dim):
            g = amat.T @ dmat[m] @ cmat                 # (n1, n3)
            term = np.outer(tp[:, m], rp[m, :]) * g
            out, comp = _kahan(out, comp, term)
    elif rep.kind == "first_kind":
        amat = _eval_factor_list(rep.left, la)          # (J, n1)
        bmat = _eval_factor_list(rep.mid, mu)           # (K, n2)
        dmat = np.asarray(rep.double(nu), dtype=np.complex128)  # (n3, J, K)
        for l in range(dc.dim):
            g = amat.T @ dmat[l] @ bmat                 # (n1, n2)
            out[:, l] = (tp * g) @ rp[:, l]
    else:  # second_kind
        bmat = _eval_factor_list(rep.mid, mu)           # (J, n2)
        cmat = _eval_factor_list(rep.right, nu)         # (K, n3)
        dmat = np.asarray(rep.double(la), dtype=np.complex128)  # (n1, J, K)
        for i in range(da.dim):
            g = bmat.T @ dmat[i] @ cmat                 # (n2, n3)
            out[i, :] = tp[i, :] @ (rp * g)
    return ua @ out @ uc.conj().T


def _transposed_double(double):
    def swapped(points):
        return np.swapaxes(np.asarray(double(points), dtype=np.complex128), 1, 2)
    return swapped


def eval_via_trace_duality(rep: HaagerupRep, a, t, b, r, c) -> np.ndarray:
    """First/second-kind integrals through their defining trace pairing.

    The integral of the first kind is the operator W with
    trace(W Q) = trace((inner Haagerup integral of the reindexed integrand
    against R, Q) T) for every Q; the second kind pairs against R instead.
    Reconstructs W by pairing with all matrix units, so use at small
    dimensions; agreement with eval_representation is the definitional
    consistency check.
    """
    da, db, dc = as_decomposition(a), as_decomposition(b), as_decomposition(c)
    t = np.asarray(t, dtype=np.complex128)
    r = np.asarray(r, dtype=np.complex128)
    n1, n3 = da.dim, dc.dim
    w = np.zeros((n1, n3), dtype=np.complex128)
    if rep.kind == "first_kind":
        # inner integrand over (x2, x3, x1): sum_kj beta_k gamma~_kj alpha_j
        inner = HaagerupRep(kind="haagerup", left=rep.mid,
                            double=_transposed_double(rep.double), right=rep.left,
                            shape=(rep.shape[1], rep.shape[0]))
        for p in range(n1):
            for q in range(n3):
                qmat = np.zeros((n3, n1), dtype=np.complex128)
                qmat[q, p] = 1.0
                v = eval_representation(inner, db, r, dc, qmat, da)
                w[p, q] = np.trace(v @ t)
    elif rep.kind == "second_kind":
        # inner integrand over (x3, x1, x2): sum_kj gamma_k alpha~_kj beta_j
        inner = HaagerupRep(kind="haagerup", left=rep.right,
                            double=_transposed_double(rep.double), right=rep.mid,
                            shape=(rep.shape[1], rep.shape[0]))
        for p in range(n1):
            for q in range(n3):
                qmat = np.zeros((n3, n1), dtype=np.complex128)
                qmat[q, p] = 1.0
                v = eval_representation(inner, dc, qmat, da, t, db)
                w[p, q] = np.trace(v @ r)
    else:
        raise ValueError("trace duality applies to first/second kind representations")
    return w


def projective_to_kind(rep: HaagerupRep, kind: str, s1, s2, s3) -> HaagerupRep:
    """Rewrite a projective representation in another kind, balanced so the
    resulting factor-norm product does not exceed the projective certificate."""
    if rep.kind != "projective":
        raise ValueError("expected a projective representation")
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    s3 = np.asarray(s3, dtype=float)
    sup1 = np.abs(_eval_factor_list(rep.left, s1)).max(axis=1)
    sup2 = np.abs(_eval_factor_list(rep.mid, s2)).max(axis=1)
    sup3 = np.abs(_eval_factor_list(rep.right, s3)).max(axis=1)
    sup1 = np.maximum(sup1, 1e-300)
    sup2 = np.maximum(sup2, 1e-300)
    sup3 = np.maximum(sup3, 1e-300)
    n = len(rep.left)

    def scaled(factors, weights):
        return [(lambda x, f=f, w=w: w * np.asarray(f(x), dtype=np.complex128))
                for f, w in zip(factors, weights)]

    def diag_double(factors, weights):
        def build(points):
            pts = np.asarray(points, dtype=float)
            mat = _eval_factor_list(factors, pts) * np.asarray(weights)[:, None]
            out = np.zeros((pts.size, n, n), dtype=np.complex128)
            idx = np.arange(n)
            out[:, idx, idx] = mat.T
            return out
        return build

    if kind == "first_kind":
        w1 = np.sqrt(sup2 * sup3 / sup1)
        w2 = np.sqrt(sup1 * sup3 / sup2)
        w3 = 1.0 / sup3
        return HaagerupRep(kind="first_kind", left=scaled(rep.left, w1),
                           mid=scaled(rep.mid, w2),
                           double=diag_double(rep.right, w3), shape=(n, n),
                           tail_bound=rep.tail_bound)
    if kind == "second_kind":
        w2 = np.sqrt(sup1 * sup3 / sup2)
        w3 = np.sqrt(sup1 * sup2 / sup3)
        w1 = 1.0 / sup1
        return HaagerupRep(kind="second_kind", double=diag_double(rep.left, w1),
                           mid=scaled(rep.mid, w2), right=scaled(rep.right, w3),
                           shape=(n, n), tail_bound=rep.tail_bound)
    if kind == "haagerup":
        w1 = np.sqrt(sup2 * sup3 / sup1)
        w3 = np.sqrt(sup1 * sup2 / sup3)
        w2 = 1.0 / sup2
        return HaagerupRep(kind="haagerup", left=scaled(rep.left, w1),
                           double=diag_double(rep.mid, w2),
                           right=scaled(rep.right, w3), shape=(n, n),
                           tail_bound=rep.tail_bound)
    raise ValueError(f"cannot convert projective representation to {kind!r}")


@dataclass(frozen=True)
class S1Certificate:
    """Computed norm of a triple integral against its representation bound."""

    kind: str
    lhs: float
    bound: float
    satisfied: bool
    rep_norm: float
    tail_bound: float


def s1_certificate(rep: HaagerupRep, a, t, b, r, c,
                   w: np.ndarray | None = None) -> S1Certificate:
    """Check the kind-appropriate norm inequality on an evaluated instance.

    haagerup / projective: ||W|| <= rep_norm ||T|| ||R||;
    first kind: ||W||_S1 <= rep_norm ||T||_S1 ||R||;
    second kind: ||W||_S1 <= rep_norm ||T|| ||R||_S1.
    """
    da, db, dc = as_decomposition(a), as_decomposition(b), as_decomposition(c)
    if w is None:
        w = eval_representation(rep, da, t, db, r, dc)
    cert = rep_norm_certificate(rep, da.eigenvalues, db.eigenvalues, dc.eigenvalues)
    if rep.kind in ("haagerup", "projective"):
        lhs = schatten_norm(w, np.inf)
        bound = cert.value * schatten_norm(t, np.inf) * schatten_norm(r, np.inf)
    elif rep.kind == "first_kind":
        lhs = schatten_norm(w, 1)
        bound = cert.value * schatten_norm(t, 1) * schatten_norm(r, np.inf)
    else:
        lhs = schatten_norm(w, 1)
        bound = cert.value * schatten_norm(t, np.inf) * schatten_norm(r, 1)
    return S1Certificate(kind=rep.kind, lhs=lhs, bound=bound,
                         satisfied=bool(lhs <= bound + 1e-9),
                         rep_norm=cert.value, tail_bound=rep.tail_bound)
