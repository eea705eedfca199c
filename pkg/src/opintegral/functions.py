"""Concrete one- and two-variable function representations.

Four interchangeable forms are supported for functions of two variables:
polynomial coefficient matrices, products u(x)v(y), band-limited samples on
a periodic grid (evaluated anywhere by trigonometric interpolation), and
closed-form expression trees over {+, *, exp, sin, cos}.  Polynomials and
closed forms differentiate exactly; sampled functions differentiate
spectrally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


# ---------------------------------------------------------------------------
# expression trees


class Expr:
    """Closed-form expression node; vectorized evaluation over numpy arrays."""

    def __add__(self, other):
        return Add(self, _as_expr(other))

    def __radd__(self, other):
        return Add(_as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, _as_expr(other))

    def __rmul__(self, other):
        return Mul(_as_expr(other), self)

    def __sub__(self, other):
        return Add(self, Mul(Const(-1.0), _as_expr(other)))

    def __rsub__(self, other):
        return Add(_as_expr(other), Mul(Const(-1.0), self))

    def __neg__(self):
        return Mul(Const(-1.0), self)

    def eval(self, x, y):
        raise NotImplementedError

    def diff(self, var: str) -> "Expr":
        raise NotImplementedError

    def conj(self) -> "Expr":
        raise NotImplementedError


def _as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    return Const(complex(v))


@dataclass(frozen=True)
class Const(Expr):
    value: complex

    def eval(self, x, y):
        return self.value

    def diff(self, var):
        return Const(0.0)

    def conj(self):
        return Const(np.conj(self.value))

    def __repr__(self):
        v = complex(self.value)
        return repr(v.real) if v.imag == 0 else repr(v)


@dataclass(frozen=True)
class Var(Expr):
    name: str  # "x" or "y"

    def eval(self, x, y):
        return x if self.name == "x" else y

    def diff(self, var):
        return Const(1.0 if var == self.name else 0.0)

    def conj(self):
        return self

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr

    def eval(self, x, y):
        return self.a.eval(x, y) + self.b.eval(x, y)

    def diff(self, var):
        return Add(self.a.diff(var), self.b.diff(var))

    def conj(self):
        return Add(self.a.conj(), self.b.conj())

    def __repr__(self):
        return f"({self.a!r} + {self.b!r})"


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr

    def eval(self, x, y):
        return self.a.eval(x, y) * self.b.eval(x, y)

    def diff(self, var):
        return Add(Mul(self.a.diff(var), self.b), Mul(self.a, self.b.diff(var)))

    def conj(self):
        return Mul(self.a.conj(), self.b.conj())

    def __repr__(self):
        return f"({self.a!r} * {self.b!r})"


class _Unary(Expr):
    pass


@dataclass(frozen=True)
class ExpF(_Unary):
    a: Expr

    def eval(self, x, y):
        return np.exp(self.a.eval(x, y))

    def diff(self, var):
        return Mul(self.a.diff(var), self)

    def conj(self):
        return ExpF(self.a.conj())

    def __repr__(self):
        return f"exp({self.a!r})"


@dataclass(frozen=True)
class SinF(_Unary):
    a: Expr

    def eval(self, x, y):
        return np.sin(self.a.eval(x, y))

    def diff(self, var):
        return Mul(self.a.diff(var), CosF(self.a))

    def conj(self):
        return SinF(self.a.conj())

    def __repr__(self):
        return f"sin({self.a!r})"


@dataclass(frozen=True)
class CosF(_Unary):
    a: Expr

    def eval(self, x, y):
        return np.cos(self.a.eval(x, y))

    def diff(self, var):
        return Mul(Const(-1.0), Mul(self.a.diff(var), SinF(self.a)))

    def conj(self):
        return CosF(self.a.conj())

    def __repr__(self):
        return f"cos({self.a!r})"


def parse_expr(text: str) -> Expr:
    """Parse "exp(-(x*x + y*y)) + 0.5*sin(x)" style expressions.

    Grammar: sums of products of powers of atoms; atoms are numbers, x, y,
    exp/sin/cos calls and parenthesized subexpressions.  "**" accepts only
    nonnegative integer exponents and "/" only numeric literal divisors.
    """
    tokens = _tokenize(text)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take(expected=None):
        tok = peek()
        if tok is None:
            raise ValueError(f"unexpected end of expression in {text!r}")
        if expected is not None and tok != expected:
            raise ValueError(f"expected {expected!r}, got {tok!r} in {text!r}")
        pos[0] += 1
        return tok

    def parse_sum():
        node = parse_term()
        while peek() in ("+", "-"):
            op = take()
            rhs = parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_term():
        node = parse_power()
        while peek() in ("*", "/"):
            op = take()
            rhs = parse_power()
            if op == "*":
                node = Mul(node, rhs)
            else:
                if not isinstance(rhs, Const):
                    raise ValueError("division only by numeric literals")
                node = Mul(node, Const(1.0 / rhs.value))
        return node

    def parse_power():
        base = parse_atom()
        if peek() == "**":
            take()
            expo = parse_atom()
            if not isinstance(expo, Const) or complex(expo.value).imag != 0:
                raise ValueError("exponent must be a nonnegative integer literal")
            k = complex(expo.value).real
            if k != int(k) or k < 0:
                raise ValueError("exponent must be a nonnegative integer literal")
            k = int(k)
            node = Const(1.0)
            for _ in range(k):
                node = Mul(node, base)
            return node
        return base

    def parse_atom():
        tok = peek()
        if tok == "-":
            take()
            return -parse_atom()
        if tok == "+":
            take()
            return parse_atom()
        if tok == "(":
            take()
            node = parse_sum()
            take(")")
            return node
        if tok in ("exp", "sin", "cos"):
            take()
            take("(")
            inner = parse_sum()
            take(")")
            return {"exp": ExpF, "sin": SinF, "cos": CosF}[tok](inner)
        if tok in ("x", "y"):
            take()
            return Var(tok)
        take()
        try:
            return Const(float(tok))
        except ValueError:
            raise ValueError(f"unexpected token {tok!r} in {text!r}") from None

    node = parse_sum()
    if pos[0] != len(tokens):
        raise ValueError(f"trailing input after position {pos[0]} in {text!r}")
    return node


def _tokenize(text: str) -> list[str]:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif text.startswith("**", i):
            out.append("**")
            i += 2
        elif c in "+-*/()":
            out.append(c)
            i += 1
        elif c.isalpha():
            j = i
            while j < len(text) and text[j].isalpha():
                j += 1
            out.append(text[i:j])
            i = j
        elif c.isdigit() or c == ".":
            j = i
            while j < len(text) and (text[j].isdigit() or text[j] in ".eE" or
                                     (text[j] in "+-" and text[j - 1] in "eE")):
                j += 1
            out.append(text[i:j])
            i = j
        else:
            raise ValueError(f"bad character {c!r} in expression")
    return out


# ---------------------------------------------------------------------------
# periodic grids and sampled data


@dataclass(frozen=True)
class UniformGrid:
    """Uniform periodic grid on [-L/2, L/2)^d with N points per axis."""

    dim: int
    period: float
    points: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("grid dimension must be 1 or 2")
        if self.points < 2:
            raise ValueError("grid needs at least 2 points per axis")

    @property
    def spacing(self) -> float:
        return self.period / self.points

    @property
    def nyquist(self) -> float:
        """Largest resolvable |frequency| (radians per unit length)."""
        return np.pi * self.points / self.period

    def axis(self) -> np.ndarray:
        return -0.5 * self.period + self.spacing * np.arange(self.points)

    def frequencies(self) -> np.ndarray:
        """Signed angular frequencies (radians per unit length) in FFT bin order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)

    def radial_frequencies(self) -> np.ndarray:
        """|xi| per FFT bin: 1-d vector, or 2-d array for dim 2."""
        xi = self.frequencies()
        if self.dim == 1:
            return np.abs(xi)
        return np.sqrt(xi[:, None] ** 2 + xi[None, :] ** 2)


def _interp_matrix(grid: UniformGrid, points: np.ndarray) -> np.ndarray:
    """E[p, k] = exp(i xi_k (points_p - x0)) / N, for Fourier-series evaluation."""
    xi = grid.frequencies()
    x0 = -0.5 * grid.period
    return np.exp(1j * np.outer(np.asarray(points, dtype=float) - x0, xi)) / grid.points


# ---------------------------------------------------------------------------
# one-variable functions


class Function1D:
    """One-variable function: polynomial coefficients, a closed form, or samples.

    Supports pointwise evaluation, exact/spectral differentiation, complex
    conjugation, and uniform sup-norm estimation on an interval.
    """

    def __init__(self, kind: str, data, grid: UniformGrid | None = None):
        if kind not in ("polynomial", "closed_form", "sampled"):
            raise ValueError(f"unknown Function1D kind {kind!r}")
        self.kind = kind
        self.grid = grid
        if kind == "polynomial":
            self.data = np.atleast_1d(np.asarray(data, dtype=np.complex128))
        elif kind == "closed_form":
            if not isinstance(data, Expr):
                raise TypeError("closed_form expects an Expr")
            self.data = data
        else:
            if grid is None or grid.dim != 1:
                raise ValueError("sampled Function1D needs a 1-d grid")
            self.data = np.asarray(data, dtype=np.complex128)
            if self.data.shape != (grid.points,):
                raise ValueError("sample count does not match grid")

    @classmethod
    def polynomial(cls, coeffs) -> "Function1D":
        return cls("polynomial", coeffs)

    @classmethod
    def closed_form(cls, expr) -> "Function1D":
        if isinstance(expr, str):
            expr = parse_expr(expr)
        return cls("closed_form", expr)

    @classmethod
    def sampled(cls, values, grid: UniformGrid) -> "Function1D":
        return cls("sampled", values, grid)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(x, self.data)
        if self.kind == "closed_form":
            out = np.asarray(self.data.eval(x, None))
            return out + np.zeros(x.shape) if out.shape != x.shape else out
        e = _interp_matrix(self.grid, np.ravel(x))
        vals = e @ np.fft.fft(self.data)
        return vals.reshape(np.shape(x))

    def derivative(self) -> "Function1D":
        if self.kind == "polynomial":
            return Function1D.polynomial(np.polynomial.polynomial.polyder(self.data))
        if self.kind == "closed_form":
            return Function1D.closed_form(self.data.diff("x"))
        spec = np.fft.fft(self.data) * (1j * self.grid.frequencies())
        return Function1D.sampled(np.fft.ifft(spec), self.grid)

    def conjugate(self) -> "Function1D":
        if self.kind == "polynomial":
            return Function1D.polynomial(np.conj(self.data))
        if self.kind == "closed_form":
            return Function1D.closed_form(self.data.conj())
        return Function1D.sampled(np.conj(self.data), self.grid)

    def sup_abs(self, lo: float, hi: float, samples: int = 4096) -> float:
        xs = np.linspace(lo, hi, samples)
        return float(np.abs(self(xs)).max())


# ---------------------------------------------------------------------------
# two-variable functions


class Function2D:
    """Two-variable function in one of four concrete forms.

    polynomial: coefficient matrix a[j, k] for sum a_jk x^j y^k (exact Horner
    evaluation); product: u(x) * v(y); sampled: values on a square periodic
    grid, evaluated off-grid by trigonometric interpolation; closed_form: an
    expression tree.
    """

    def __init__(self, kind: str, data, grid: UniformGrid | None = None):
        if kind not in ("polynomial", "product", "sampled", "closed_form"):
            raise ValueError(f"unknown Function2D kind {kind!r}")
        self.kind = kind
        self.grid = grid
        if kind == "polynomial":
            self.data = np.atleast_2d(np.asarray(data, dtype=np.complex128))
        elif kind == "product":
            u, v = data
            if not (isinstance(u, Function1D) and isinstance(v, Function1D)):
                raise TypeError("product expects a pair of Function1D")
            self.data = (u, v)
        elif kind == "sampled":
            if grid is None or grid.dim != 2:
                raise ValueError("sampled Function2D needs a 2-d grid")
            self.data = np.asarray(data, dtype=np.complex128)
            if self.data.shape != (grid.points, grid.points):
                raise ValueError("sample shape does not match grid")
        else:
            if isinstance(data, str):
                data = parse_expr(data)
            if not isinstance(data, Expr):
                raise TypeError("closed_form expects an Expr or string")
            self.data = data

    @classmethod
    def polynomial(cls, coeffs) -> "Function2D":
        return cls("polynomial", coeffs)

    @classmethod
    def product(cls, u: Function1D, v: Function1D) -> "Function2D":
        return cls("product", (u, v))

    @classmethod
    def sampled(cls, values, grid: UniformGrid) -> "Function2D":
        return cls("sampled", values, grid)

    @classmethod
    def closed_form(cls, expr) -> "Function2D":
        return cls("closed_form", expr)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "polynomial":
            shape = np.broadcast_shapes(x.shape, y.shape)
            return np.polynomial.polynomial.polyval2d(
                np.broadcast_to(x, shape), np.broadcast_to(y, shape), self.data)
        if self.kind == "product":
            u, v = self.data
            return u(x) * v(y)
        if self.kind == "closed_form":
            out = self.data.eval(x, y)
            return np.asarray(out) + np.zeros(np.broadcast_shapes(x.shape, y.shape))
        shape = np.broadcast_shapes(x.shape, y.shape)
        xf = np.broadcast_to(x, shape).ravel()
        yf = np.broadcast_to(y, shape).ravel()
        spec = np.fft.fft2(self.data)
        ex = _interp_matrix(self.grid, xf)
        ey = _interp_matrix(self.grid, yf)
        vals = np.einsum("pk,kl,pl->p", ex, spec, ey)
        return vals.reshape(shape)

    def eval_grid(self, xs, ys) -> np.ndarray:
        """Matrix of values phi(xs[i], ys[j]) on the tensor grid xs x ys."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if self.kind == "sampled":
            spec = np.fft.fft2(self.data)
            ex = _interp_matrix(self.grid, xs)
            ey = _interp_matrix(self.grid, ys)
            return ex @ spec @ ey.T
        return self(xs[:, None], ys[None, :])

    def partial(self, axis: int) -> "Function2D":
        """Exact partial derivative along axis 1 (x) or 2 (y)."""
        if axis not in (1, 2):
            raise ValueError("axis must be 1 or 2")
        if self.kind == "polynomial":
            a = self.data
            if axis == 1:
                if a.shape[0] == 1:
                    return Function2D.polynomial(np.zeros((1, 1)))
                j = np.arange(1, a.shape[0])
                return Function2D.polynomial(a[1:, :] * j[:, None])
            if a.shape[1] == 1:
                return Function2D.polynomial(np.zeros((1, 1)))
            k = np.arange(1, a.shape[1])
            return Function2D.polynomial(a[:, 1:] * k[None, :])
        if self.kind == "product":
            u, v = self.data
            if axis == 1:
                return Function2D.product(u.derivative(), v)
            return Function2D.product(u, v.derivative())
        if self.kind == "closed_form":
            return Function2D.closed_form(self.data.diff("x" if axis == 1 else "y"))
        spec = np.fft.fft2(self.data)
        xi = 1j * self.grid.frequencies()
        spec = spec * (xi[:, None] if axis == 1 else xi[None, :])
        return Function2D.sampled(np.fft.ifft2(spec), self.grid)

    def conjugate(self) -> "Function2D":
        if self.kind == "polynomial":
            return Function2D.polynomial(np.conj(self.data))
        if self.kind == "product":
            u, v = self.data
            return Function2D.product(u.conjugate(), v.conjugate())
        if self.kind == "closed_form":
            return Function2D.closed_form(self.data.conj())
        return Function2D.sampled(np.conj(self.data), self.grid)

    def multiply(self, other: "Function2D") -> "Function2D":
        """Pointwise product, staying exact where the representations allow."""
        if self.kind == "polynomial" and other.kind == "polynomial":
            a, b = self.data, other.data
            out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1),
                           dtype=np.complex128)
            for j in range(a.shape[0]):
                for k in range(a.shape[1]):
                    if a[j, k] != 0:
                        out[j:j + b.shape[0], k:k + b.shape[1]] += a[j, k] * b
            return Function2D.polynomial(out)
        if self.kind == "sampled" and other.kind == "sampled" and self.grid == other.grid:
            return Function2D.sampled(self.data * other.data, self.grid)
        ea = _to_expr(self)
        eb = _to_expr(other)
        if ea is not None and eb is not None:
            return Function2D.closed_form(Mul(ea, eb))
        raise ValueError(f"cannot multiply {self.kind} by {other.kind} exactly")

    def sample(self, grid: UniformGrid) -> "Function2D":
        """Resample onto a 2-d periodic grid."""
        if self.kind == "sampled" and self.grid == grid:
            return self
        ax = grid.axis()
        return Function2D.sampled(self.eval_grid(ax, ax), grid)


def _to_expr(f: Function2D) -> Expr | None:
    if f.kind == "closed_form":
        return f.data
    if f.kind == "polynomial":
        node = Const(0.0)
        x, y = Var("x"), Var("y")
        for j in range(f.data.shape[0]):
            for k in range(f.data.shape[1]):
                c = f.data[j, k]
                if c == 0:
                    continue
                term: Expr = Const(c)
                for _ in range(j):
                    term = Mul(term, x)
                for _ in range(k):
                    term = Mul(term, y)
                node = Add(node, term)
        return node
    if f.kind == "product":
        u, v = f.data
        eu = _one_var_expr(u, "x")
        ev = _one_var_expr(v, "y")
        if eu is not None and ev is not None:
            return Mul(eu, ev)
    return None


def _one_var_expr(f: Function1D, var: str) -> Expr | None:
    if f.kind == "closed_form":
        return f.data if var == "x" else _swap_vars(f.data)
    if f.kind == "polynomial":
        node = Const(0.0)
        v = Var(var)
        for k, c in enumerate(f.data):
            if c == 0:
                continue
            term: Expr = Const(c)
            for _ in range(k):
                term = Mul(term, v)
            node = Add(node, term)
        return node
    return None


def _swap_vars(e: Expr) -> Expr:
    if isinstance(e, Var):
        return Var("y" if e.name == "x" else "x")
    if isinstance(e, Const):
        return e
    if isinstance(e, Add):
        return Add(_swap_vars(e.a), _swap_vars(e.b))
    if isinstance(e, Mul):
        return Mul(_swap_vars(e.a), _swap_vars(e.b))
    if isinstance(e, ExpF):
        return ExpF(_swap_vars(e.a))
    if isinstance(e, SinF):
        return SinF(_swap_vars(e.a))
    if isinstance(e, CosF):
        return CosF(_swap_vars(e.a))
    raise TypeError(f"cannot swap variables in {type(e).__name__}")
