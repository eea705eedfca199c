import numpy as np
import pytest

from opintegral.doi import (double_operator_integral, funcalc,
                            one_var_commutator_identity, projective_decompose_trig,
                            scalar_calculus, schur_multiplier_norm,
                            _witness_from_factorization)
from opintegral.functions import Function1D, Function2D
from opintegral.rng import Xorshift64Star
from opintegral.spectral import decompose


def test_doi_constant_one_returns_t(rng):
    a = rng.hermitian(6)
    b = rng.hermitian(6)
    t = rng.complex_normal((6, 6))
    out = double_operator_integral(Function2D.polynomial([[1.0]]), a, t, b)
    assert np.linalg.norm(out - t) <= 1e-12 * np.linalg.norm(t)


def test_doi_product_splits(rng):
    a = rng.hermitian(6)
    b = rng.hermitian(6)
    t = rng.complex_normal((6, 6))
    u = Function1D.closed_form("sin(x)")
    v = Function1D.polynomial([0.0, 1.0, 0.5])
    out = double_operator_integral(Function2D.product(u, v), a, t, b)
    expected = scalar_calculus(u, a) @ t @ scalar_calculus(v, b)
    assert np.linalg.norm(out - expected) <= 1e-10


def test_doi_diagonal_is_entrywise(rng):
    la = np.array([-1.0, 0.2, 2.0])
    mu = np.array([0.5, 1.5, 3.0])
    t = rng.complex_normal((3, 3))
    phi = Function2D.closed_form("x*y + cos(x)")
    out = double_operator_integral(phi, np.diag(la), t, np.diag(mu))
    # index-sum oracle
    expected = np.array([[phi(la[i], mu[j]) * t[i, j] for j in range(3)]
                         for i in range(3)])
    assert np.linalg.norm(out - expected) <= 1e-12 * np.linalg.norm(t)


def test_doi_rejects_unevaluable_point(rng):
    a = np.diag([0.0, 1.0])
    b = np.diag([0.0, 2.0])

    def bad(x, y):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / (x * y)

    with pytest.raises(ValueError, match="not evaluable"):
        double_operator_integral(bad, a, np.eye(2), b)


def test_funcalc_product_property(rng):
    a = rng.hermitian(8)
    b = rng.hermitian(8)
    u = Function1D.polynomial([0.0, 0.0, 1.0])
    v = Function1D.closed_form("cos(x)")
    out = funcalc(Function2D.product(u, v), a, b)
    assert np.linalg.norm(out - scalar_calculus(u, a) @ scalar_calculus(v, b)) <= 1e-10


def test_funcalc_commuting_diagonal():
    d = np.diag([1.0, 2.0, 3.0])
    phi = Function2D.closed_form("exp(-(x - y)**2) + x*y")
    out = funcalc(phi, d, d)
    assert np.allclose(np.diag(out), [phi(v, v) for v in (1.0, 2.0, 3.0)])


def test_funcalc_polynomial_matches_matrix_powers(rng):
    a = rng.hermitian(10)
    b = rng.hermitian(10)
    coeffs = np.zeros((3, 3))
    coeffs[0, 1], coeffs[2, 0], coeffs[1, 2], coeffs[2, 2] = 1.0, -0.5, 2.0, 0.25
    phi = Function2D.polynomial(coeffs)
    out = funcalc(phi, a, b)
    # direct matrix-polynomial oracle, A-powers to the left
    expected = np.zeros_like(out)
    for j in range(3):
        for k in range(3):
            if coeffs[j, k]:
                expected += coeffs[j, k] * np.linalg.matrix_power(a, j) @ \
                    np.linalg.matrix_power(b, k)
    scale = max(np.linalg.norm(expected, 2), 1.0)
    assert np.linalg.norm(out - expected, 2) <= 1e-10 * scale


def test_funcalc_linearity(rng):
    a = rng.hermitian(6)
    b = rng.hermitian(6)
    da, db = decompose(a), decompose(b)
    phi = Function2D.closed_form("sin(x)*cos(y)")
    psi = Function2D.polynomial([[0.0, 1.0], [1.0, 0.0]])
    mix = Function2D.closed_form("2.0*sin(x)*cos(y) + 3.0*(y + x)")
    lhs = funcalc(mix, da, db)
    rhs = 2.0 * funcalc(phi, da, db) + 3.0 * funcalc(psi, da, db)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * max(np.linalg.norm(lhs), 1.0)


def test_one_var_identity_linear(rng):
    a = rng.hermitian(6)
    b = rng.hermitian(6)
    q = rng.complex_normal((6, 6))
    resid = one_var_commutator_identity(Function1D.polynomial([0.0, 1.0]), a, b, q)
    assert resid <= 1e-13 * np.linalg.norm(q, 2) * max(np.linalg.norm(a, 2), 1.0)


def test_one_var_identity_square_with_symbolic_oracle(rng):
    a = rng.hermitian(12)
    b = rng.hermitian(12)
    q = rng.complex_normal((12, 12))
    scale = np.linalg.norm(a, 2) * np.linalg.norm(q, 2)
    resid = one_var_commutator_identity(Function1D.polynomial([0.0, 0.0, 1.0]), a, b, q)
    assert resid <= 1e-10 * scale
    # the identity rearranges to A^2 Q - Q B^2 = A(AQ - QB) + (AQ - QB)B
    lhs = a @ a @ q - q @ b @ b
    rhs = a @ (a @ q - q @ b) + (a @ q - q @ b) @ b
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-12 * scale


def test_one_var_identity_degree_five(rng):
    a = rng.hermitian(12)
    b = rng.hermitian(12)
    q = rng.complex_normal((12, 12))
    f = Function1D.polynomial([0.3, 1.0, -2.0, 0.5, 0.0, 1.2])
    scale = max(np.linalg.norm(a, 2), np.linalg.norm(b, 2)) ** 5 * np.linalg.norm(q, 2)
    assert one_var_commutator_identity(f, a, b, q) <= 1e-10 * scale


def test_one_var_identity_coincident_spectra(rng):
    a = rng.hermitian(6)
    q = rng.complex_normal((6, 6))
    f = Function1D.closed_form("sin(x)")
    resid = one_var_commutator_identity(f, a, a, q)
    assert resid <= 1e-10 * np.linalg.norm(q, 2)


# ---------------------------------------------------------------------------
# Schur multiplier certificates


def test_schur_all_ones_exact():
    cert = schur_multiplier_norm(np.ones((5, 7)))
    assert cert.upper == pytest.approx(1.0, abs=1e-9)
    assert cert.lower == pytest.approx(1.0, abs=1e-9)
    assert cert.witness_min_eig >= -1e-8


def test_schur_rank_one(rng):
    u = rng.complex_normal(4)
    v = rng.complex_normal(6)
    cert = schur_multiplier_norm(np.outer(u, v))
    target = np.abs(u).max() * np.abs(v).max()
    assert cert.upper == pytest.approx(target, abs=1e-6 * target)
    assert cert.lower == pytest.approx(target, abs=1e-6 * target)


def test_schur_sign_matrix():
    phi = np.array([[1.0, 1.0], [1.0, -1.0]])
    # oracle: the explicit factorization rows x1=(1,0), x2=(0,1) against
    # columns y1=(1,1), y2=(1,-1) certifies sqrt(2) from above
    p = np.array([[1.0, 0.0], [0.0, 1.0]])
    q = np.array([[1.0, 1.0], [1.0, -1.0]])
    assert np.allclose(p.conj().T @ q, phi)
    _, _, oracle_bound = _witness_from_factorization(p, q)
    assert oracle_bound == pytest.approx(np.sqrt(2.0), abs=1e-12)
    cert = schur_multiplier_norm(phi, tol=1e-4)
    assert cert.gap <= 1e-4
    assert cert.upper == pytest.approx(np.sqrt(2.0), abs=1e-4)
    assert cert.lower == pytest.approx(np.sqrt(2.0), abs=1e-4)


def test_schur_sandwich_and_witness(rng):
    for k in range(4):
        m = rng.complex_normal((5, 5))
        cert = schur_multiplier_norm(m, tol=1e-3)
        assert cert.lower <= cert.upper + 1e-9
        assert cert.witness_min_eig >= -1e-8
        # lower bound witness is a genuine contraction achieving its ratio
        z = cert.lower_witness
        ratio = np.linalg.norm(m * z, 2) / np.linalg.norm(z, 2)
        assert ratio == pytest.approx(cert.lower, rel=1e-9)


def test_schur_zero_matrix():
    cert = schur_multiplier_norm(np.zeros((3, 4)))
    assert cert.upper == 0.0 and cert.lower == 0.0 and cert.converged


def test_schur_identity_matrix():
    cert = schur_multiplier_norm(np.eye(6), tol=1e-6)
    assert cert.lower == pytest.approx(1.0, abs=1e-9)
    assert cert.upper == pytest.approx(1.0, abs=1e-9)


def test_schur_requires_positive_tol():
    with pytest.raises(ValueError):
        schur_multiplier_norm(np.eye(2), tol=0.0)


def test_schur_bad_factorization_rejected(rng):
    m = rng.complex_normal((3, 3))
    with pytest.raises(ValueError, match="factorization"):
        schur_multiplier_norm(m, factorizations=[(np.eye(3), np.eye(3))])


# ---------------------------------------------------------------------------
# projective rows of trig polynomials


def _coeff_matrix(deg, entries):
    c = np.zeros((2 * deg + 1, 2 * deg + 1), dtype=np.complex128)
    for (j, k), v in entries.items():
        c[j + deg, k + deg] = v
    return c


def test_trig_rows_single_exponential():
    rows = projective_decompose_trig(_coeff_matrix(1, {(1, 1): 1.0}))
    assert rows.bound == pytest.approx(1.0, abs=1e-12)
    assert rows.bound <= 3 * rows.sup_f + 1e-9


def test_trig_rows_cos_cos():
    c = _coeff_matrix(1, {(1, 1): 0.25, (1, -1): 0.25, (-1, 1): 0.25, (-1, -1): 0.25})
    rows = projective_decompose_trig(c)
    assert rows.sup_f == pytest.approx(1.0, abs=1e-6)
    assert rows.bound <= 3.0 * rows.sup_f + 1e-9
    xs = np.array([0.3, 1.1])
    vals = rows.evaluate(xs[:, None], xs[None, :])
    assert vals[0, 1] == pytest.approx(np.cos(0.3) * np.cos(1.1), abs=1e-12)


def test_trig_rows_random_degree_four():
    rng = Xorshift64Star(33)
    deg = 4
    c = rng.complex_normal((2 * deg + 1, 2 * deg + 1))
    rows = projective_decompose_trig(c)
    assert rows.bound <= (1 + 2 * deg) * rows.sup_f * (1 + 1e-9)


def test_projective_bound_dominates_schur_upper():
    rng = Xorshift64Star(7)
    deg = 2
    c = rng.complex_normal((2 * deg + 1, 2 * deg + 1))
    rows = projective_decompose_trig(c)
    xs = np.linspace(0.0, 2 * np.pi, 8, endpoint=False)
    ys = np.linspace(0.3, 0.3 + 2 * np.pi, 8, endpoint=False)
    sampled = rows.evaluate(xs[:, None], ys[None, :])
    p, q = rows.factorization(xs, ys)
    assert np.linalg.norm(p.conj().T @ q - sampled) <= 1e-9 * np.abs(sampled).max()
    cert = schur_multiplier_norm(sampled, tol=1e-4, factorizations=[(p, q)])
    assert cert.upper <= rows.bound + 1e-9
