import json

import numpy as np
import pytest

from opintegral.cli import DATA_DIR, main
from opintegral.fileio import (read_config, read_function_spec, read_matrix,
                               read_samples, read_symbol, write_function_spec,
                               write_matrix, write_samples, write_symbol)
from opintegral.functions import Function1D, Function2D, UniformGrid
from opintegral.models import Symbol
from opintegral.rng import Xorshift64Star


def test_matrix_roundtrip(tmp_path, rng):
    m = rng.complex_normal((5, 5))
    path = tmp_path / "m.opmat"
    write_matrix(path, m)
    back = read_matrix(path)
    assert np.array_equal(back, m)
    assert path.read_text().splitlines()[0] == "dim 5 complex"


def test_samples_roundtrip(tmp_path):
    grid = UniformGrid(dim=1, period=2 * np.pi, points=16)
    vals = np.exp(1j * grid.axis())
    path = tmp_path / "f.opfun"
    write_samples(path, vals, grid)
    back, grid2 = read_samples(path)
    assert grid2 == grid
    assert np.array_equal(back, vals)


def test_symbol_roundtrip(tmp_path):
    sym = Symbol.from_dict({2: 1.0, 1: 0.5 - 0.25j, -1: 0.5 + 0.25j})
    path = tmp_path / "f.sym"
    write_symbol(path, sym)
    back = read_symbol(path)
    assert np.array_equal(back.coeffs, sym.coeffs)


def test_function_spec_roundtrips(tmp_path):
    poly = Function2D.polynomial([[0.0, 1.5], [2.0, 0.0]])
    p = tmp_path / "poly.spec"
    write_function_spec(p, poly)
    back = read_function_spec(p)
    assert back(1.3, -0.7) == pytest.approx(poly(1.3, -0.7))

    closed = Function2D.closed_form("exp(-(x*x + y*y)) + 0.5*sin(x)")
    c = tmp_path / "closed.spec"
    write_function_spec(c, closed)
    back = read_function_spec(c)
    assert back(0.4, 0.2) == pytest.approx(closed(0.4, 0.2))

    prod = Function2D.product(Function1D.closed_form("sin(x)"),
                              Function1D.closed_form("1 + x*x"))
    pr = tmp_path / "prod.spec"
    write_function_spec(pr, prod)
    back = read_function_spec(pr)
    assert back(0.3, 2.0) == pytest.approx(np.sin(0.3) * 5.0)

    grid = UniformGrid(dim=2, period=2 * np.pi, points=8)
    ax = grid.axis()
    samp = Function2D.sampled(np.outer(np.sin(ax), np.cos(ax)), grid)
    sp = tmp_path / "samp.spec"
    write_function_spec(sp, samp, samples_path=tmp_path / "samp.opfun")
    back = read_function_spec(sp)
    assert back(0.5, 0.25) == pytest.approx(samp(0.5, 0.25))


def test_config_parsing(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("# comment line\nmode single   # trailing comment\nn 64\n\nseed 7\n")
    parsed = read_config(cfg)
    assert parsed == {"mode": "single", "n": "64", "seed": "7"}


def test_bad_matrix_file(tmp_path):
    path = tmp_path / "bad.opmat"
    path.write_text("dim 2 complex\n1.0 0.0\n")
    with pytest.raises(ValueError, match="expected 4 entries"):
        read_matrix(path)


def test_cli_besov_on_bundled_sin(capsys):
    code = main(["besov-norm", "--input", str(DATA_DIR / "sin.opfun"), "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert abs(payload["value"] - 1.0) <= 1e-6


def test_cli_trace_formula_bundled(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["trace-formula", "--config", str(DATA_DIR / "shift_suite.cfg"),
                 "--out", str(out), "--json"])
    assert code == 0
    payload = json.loads(out.read_text())
    by_pair = {row["pair"]: row for row in payload["suite"]}
    assert by_pair["x,y"]["lhs"] == pytest.approx(0.5, abs=1e-8)
    assert by_pair["x,y"]["rhs"] == pytest.approx(0.5, abs=5e-3)
    assert by_pair["x^2,xy"]["lhs"] == pytest.approx(0.25, abs=1e-8)


def test_cli_funcalc_and_probe(tmp_path, capsys):
    rng = Xorshift64Star(4)
    a = rng.hermitian(6)
    b = rng.hermitian(6)
    write_matrix(tmp_path / "A.opmat", a)
    write_matrix(tmp_path / "B.opmat", b)
    code = main(["funcalc", "--phi", str(DATA_DIR / "phi_xy.spec"),
                 "--A", str(tmp_path / "A.opmat"), "--B", str(tmp_path / "B.opmat"),
                 "--out", str(tmp_path / "out.opmat")])
    assert code == 0
    out = read_matrix(tmp_path / "out.opmat")
    assert np.linalg.norm(out - a @ b, 2) <= 1e-10
    code = main(["probe", "--phi", str(DATA_DIR / "phi_x.spec"),
                 "--psi", str(DATA_DIR / "psi_y.spec"),
                 "--A", str(tmp_path / "A.opmat"), "--B", str(tmp_path / "B.opmat"),
                 "--out", str(tmp_path / "probe.json")])
    assert code == 0
    payload = json.loads((tmp_path / "probe.json").read_text())
    assert payload["multiplicativity_defect_s1"] <= 1e-10


def test_cli_schur_norm(tmp_path, capsys):
    write_matrix(tmp_path / "Phi.opmat", np.ones((3, 3)))
    code = main(["schur-norm", "--matrix", str(tmp_path / "Phi.opmat"),
                 "--tol", "1e-6", "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["upper"] == pytest.approx(1.0, abs=1e-9)


def test_cli_commutator_suite(tmp_path, capsys):
    code = main(["commutator-verify", "--phi", str(DATA_DIR / "phi_xy.spec"),
                 "--trials", "2", "--seed", "9", "--max-dim", "8",
                 "--report", str(tmp_path / "r.json")])
    assert code == 0
    payload = json.loads((tmp_path / "r.json").read_text())
    assert len(payload["trials"]) == 2
    assert payload["max_residual_s1"] <= 1e-10


def test_cli_reports_are_deterministic(tmp_path):
    args = ["besov-norm", "--input", str(DATA_DIR / "sin.opfun"),
            "--out", str(tmp_path / "a.json")]
    assert main(args) == 0
    first = (tmp_path / "a.json").read_bytes()
    assert main(args) == 0
    assert (tmp_path / "a.json").read_bytes() == first


def test_cli_missing_file_is_validation_error(capsys):
    code = main(["besov-norm", "--input", "/nonexistent/f.opfun"])
    assert code == 1


def test_cli_unknown_flag_exits_one(capsys):
    assert main(["besov-norm", "--nonsense"]) == 1


def test_cli_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
