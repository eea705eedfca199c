"""File formats: matrices, sampled functions, symbols, function specs, configs.

All formats are line-oriented UTF-8 text.  Reports are JSON with sorted keys
and no timestamps, so identical inputs produce byte-identical output.

.opmat   header "dim n complex", then n^2 lines "re im", row-major.
.opfun   header "grid d L N", then N^d lines "re im", row-major.
.sym     header "deg d", then lines "k re im" for the Fourier coefficients.
.spec    function spec: "variant" line, then variant-specific keys.
.cfg     flat "key value" lines, "#" comments.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .functions import Function1D, Function2D, UniformGrid, parse_expr
from .models import Symbol


def write_matrix(path, m: np.ndarray) -> None:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("only square matrices are stored")
    n = m.shape[0]
    lines = [f"dim {n} complex"]
    for v in m.ravel():
        lines.append(f"{float(v.real)!r} {float(v.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix(path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "dim" or head[2] != "complex":
        raise ValueError(f"{path}: bad header {lines[0]!r}, expected 'dim n complex'")
    n = int(head[1])
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != n * n:
        raise ValueError(f"{path}: expected {n * n} entries, found {len(body)}")
    vals = np.array([complex(float(a), float(b)) for a, b in
                     (ln.split() for ln in body)])
    return vals.reshape(n, n)


def write_samples(path, values: np.ndarray, grid: UniformGrid) -> None:
    values = np.asarray(values, dtype=np.complex128)
    expected = (grid.points,) if grid.dim == 1 else (grid.points, grid.points)
    if values.shape != expected:
        raise ValueError(f"sample shape {values.shape} does not match grid {expected}")
    lines = [f"grid {grid.dim} {float(grid.period)!r} {grid.points}"]
    for v in values.ravel():
        lines.append(f"{float(v.real)!r} {float(v.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_samples(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty sample file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "grid":
        raise ValueError(f"{path}: bad header {lines[0]!r}, expected 'grid d L N'")
    dim, period, points = int(head[1]), float(head[2]), int(head[3])
    grid = UniformGrid(dim=dim, period=period, points=points)
    body = [ln for ln in lines[1:] if ln.strip()]
    count = points ** dim
    if len(body) != count:
        raise ValueError(f"{path}: expected {count} values, found {len(body)}")
    vals = np.array([complex(float(a), float(b)) for a, b in
                     (ln.split() for ln in body)])
    shape = (points,) if dim == 1 else (points, points)
    return vals.reshape(shape), grid


def write_symbol(path, sym: Symbol) -> None:
    lines = [f"deg {sym.degree}"]
    for k in range(-sym.degree, sym.degree + 1):
        c = sym.coefficient(k)
        lines.append(f"{k} {float(c.real)!r} {float(c.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_symbol(path) -> Symbol:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    head = lines[0].split()
    if len(head) != 2 or head[0] != "deg":
        raise ValueError(f"{path}: bad header {lines[0]!r}, expected 'deg d'")
    deg = int(head[1])
    entries = {}
    for ln in lines[1:]:
        k, re, im = ln.split()
        entries[int(k)] = complex(float(re), float(im))
    return Symbol.from_dict(entries, deg)


def write_function_spec(path, f: Function2D, samples_path=None) -> None:
    lines = []
    if f.kind == "polynomial":
        lines.append("variant polynomial")
        a = f.data
        for j in range(a.shape[0]):
            for k in range(a.shape[1]):
                if a[j, k] != 0:
                    lines.append(f"coeff {j} {k} {float(a[j, k].real)!r} {float(a[j, k].imag)!r}")
    elif f.kind == "closed_form":
        lines.append("variant closed_form")
        lines.append(f"expr {f.data!r}")
    elif f.kind == "product":
        u, v = f.data
        if u.kind != "closed_form" or v.kind != "closed_form":
            raise ValueError("only closed-form factors can be stored in product specs")
        lines.append("variant product")
        lines.append(f"u {u.data!r}")
        lines.append(f"v {v.data!r}")
    else:
        if samples_path is None:
            raise ValueError("sampled specs need samples_path for the .opfun file")
        write_samples(samples_path, f.data, f.grid)
        lines.append("variant sampled")
        lines.append(f"file {samples_path}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_function_spec(path) -> Function2D:
    base = Path(path).parent
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].startswith("variant"):
        raise ValueError(f"{path}: function spec must start with a 'variant' line")
    variant = lines[0].split(None, 1)[1].strip()
    if variant == "polynomial":
        entries = []
        for ln in lines[1:]:
            parts = ln.split()
            if parts[0] != "coeff" or len(parts) != 5:
                raise ValueError(f"{path}: bad coeff line {ln!r}")
            entries.append((int(parts[1]), int(parts[2]),
                            complex(float(parts[3]), float(parts[4]))))
        if not entries:
            return Function2D.polynomial([[0.0]])
        dj = max(e[0] for e in entries) + 1
        dk = max(e[1] for e in entries) + 1
        a = np.zeros((dj, dk), dtype=np.complex128)
        for j, k, v in entries:
            a[j, k] = v
        return Function2D.polynomial(a)
    if variant == "closed_form":
        expr = _get_key(lines, "expr", path)
        return Function2D.closed_form(expr)
    if variant == "product":
        # factors are one-variable expressions, both written in the variable x
        u = Function1D.closed_form(_get_key(lines, "u", path))
        v = Function1D.closed_form(_get_key(lines, "v", path))
        return Function2D.product(u, v)
    if variant == "sampled":
        fname = _get_key(lines, "file", path)
        p = Path(fname)
        values, grid = read_samples(p if p.is_absolute() else base / p)
        if grid.dim != 2:
            raise ValueError(f"{path}: sampled Function2D needs a 2-d grid")
        return Function2D.sampled(values, grid)
    raise ValueError(f"{path}: unknown variant {variant!r}")


def _get_key(lines, key, path) -> str:
    for ln in lines:
        if ln.startswith(key + " "):
            return ln[len(key) + 1:].strip()
    raise ValueError(f"{path}: missing '{key}' line")


def read_representation(path):
    """Structured-text representation files for triple-integral integrands.

    Format: a "kind" line, then factor lines.  Single-index factor families
    are "left <expr>", "mid <expr>", "right <expr>" lines (one per factor,
    one-variable expressions in x); the doubly-indexed family is declared by
    "double J K" followed by J*K lines "j k <expr>" (zero-based indices;
    omitted entries are zero).  Example:

        kind first_kind
        left 1
        left x
        mid 1
        mid x
        double 2 2
        0 0 y
        0 1 2*y
    """
    from .toi import HaagerupRep

    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].startswith("kind"):
        raise ValueError(f"{path}: representation file must start with a 'kind' line")
    kind = lines[0].split(None, 1)[1].strip()
    factors = {"left": [], "mid": [], "right": []}
    double_shape = None
    double_exprs = {}
    i = 1
    while i < len(lines):
        parts = lines[i].split(None, 1)
        key = parts[0]
        if key in factors:
            factors[key].append(_expr_factor(parts[1]))
            i += 1
        elif key == "double":
            j, k = parts[1].split()
            double_shape = (int(j), int(k))
            i += 1
            while i < len(lines):
                entry = lines[i].split(None, 2)
                if len(entry) != 3 or not entry[0].lstrip("-").isdigit():
                    break
                double_exprs[(int(entry[0]), int(entry[1]))] = parse_expr(entry[2])
                i += 1
        else:
            raise ValueError(f"{path}: unexpected line {lines[i]!r}")
    double = None
    if double_shape is not None:
        jj, kk = double_shape
        exprs = dict(double_exprs)

        def double(points, jj=jj, kk=kk, exprs=exprs):
            pts = np.asarray(points, dtype=float)
            out = np.zeros((pts.size, jj, kk), dtype=np.complex128)
            for (j, k), e in exprs.items():
                out[:, j, k] = e.eval(pts, None)
            return out

    return HaagerupRep(kind=kind,
                       left=factors["left"] or None,
                       mid=factors["mid"] or None,
                       right=factors["right"] or None,
                       double=double,
                       shape=double_shape or (len(factors["left"]),) * 2)


def _expr_factor(text: str):
    expr = parse_expr(text)
    return lambda x, e=expr: np.asarray(e.eval(np.asarray(x, dtype=float), None),
                                        dtype=np.complex128) + np.zeros(np.shape(x))


def read_config(path) -> dict:
    """Flat key-value config: first token is the key, the rest the value."""
    out = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        out[parts[0]] = parts[1].strip() if len(parts) > 1 else ""
    return out


def write_report(path, payload: dict) -> None:
    """Deterministic JSON: sorted keys, minimal separators, trailing newline."""
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def report_text(payload: dict) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def write_csv(path, rows: list[dict]) -> None:
    """Plain CSV for external plotting; column order is first-row key order."""
    if not rows:
        Path(path).write_text("", encoding="utf-8")
        return
    cols = list(rows[0])
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(repr(row[c]) if isinstance(row[c], float)
                              else str(row[c]) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
