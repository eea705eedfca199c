"""Toeplitz and Hankel models with known principal functions.

A trigonometric-polynomial symbol f on the unit circle yields the truncated
Toeplitz matrix (T_f)_{jk} = fhat(j - k).  Real symbol pairs (f, g) give
almost commuting self-adjoint pairs: the commutator [T_f, T_g] equals
H*_{conj(g)} H_f - H*_{conj(f)} H_g with finite-rank Hankel matrices, so its
trace norm is controlled by the symbol degrees, uniformly in the truncation
size.  The index convention (H_f)_{jk} = fhat(-(j + k + 1)) is the one that
makes this identity hold entrywise on truncation windows (regression-tested
by verify_hankel_identity).

For T = T_f the essential spectrum is the symbol curve f(T); off the curve,
the principal function attached to (Re T, Im T) is the winding number of
f - lambda, evaluated here by argument accumulation along a fine
discretization of the curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CURVE_POINTS = 2 ** 14
CURVE_PROXIMITY = 1e-9
WINDING_DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class Symbol:
    """Trigonometric polynomial on the circle: coeffs[k + deg] = fhat(k)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128))
        if c.size % 2 == 0:
            raise ValueError("coefficients must cover k = -deg..deg (odd count)")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size // 2

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.degree:
            return 0.0
        return complex(self.coeffs[k + self.degree])

    @property
    def is_real_valued(self) -> bool:
        flipped = np.conj(self.coeffs[::-1])
        return bool(np.allclose(flipped, self.coeffs, atol=1e-14))

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        ks = np.arange(-self.degree, self.degree + 1)
        return np.exp(1j * np.multiply.outer(theta, ks)) @ self.coeffs

    def curve(self, points: int = CURVE_POINTS) -> np.ndarray:
        return self(np.linspace(0.0, 2.0 * np.pi, points, endpoint=False))

    def conjugate(self) -> "Symbol":
        return Symbol(np.conj(self.coeffs[::-1]))

    def real_part(self) -> "Symbol":
        return Symbol(0.5 * (self.coeffs + np.conj(self.coeffs[::-1])))

    def imag_part(self) -> "Symbol":
        return Symbol((self.coeffs - np.conj(self.coeffs[::-1])) / 2j)

    def multiply(self, other: "Symbol") -> "Symbol":
        return Symbol(np.convolve(self.coeffs, other.coeffs))

    @classmethod
    def from_dict(cls, entries: dict, degree: int | None = None) -> "Symbol":
        deg = degree if degree is not None else max(abs(k) for k in entries)
        c = np.zeros(2 * deg + 1, dtype=np.complex128)
        for k, v in entries.items():
            c[k + deg] = v
        return cls(c)


def toeplitz_matrix(f: Symbol, n: int) -> np.ndarray:
    """(T_f)_{jk} = fhat(j - k) on the n-dimensional truncation."""
    if n <= f.degree:
        raise ValueError(f"truncation {n} must exceed the symbol degree {f.degree}")
    j = np.arange(n)
    diffs = j[:, None] - j[None, :]
    out = np.zeros((n, n), dtype=np.complex128)
    mask = np.abs(diffs) <= f.degree
    out[mask] = f.coeffs[diffs[mask] + f.degree]
    return out


def hankel_matrix(f: Symbol, n: int) -> np.ndarray:
    """(H_f)_{jk} = fhat(-(j + k + 1)); finite rank = deg f for trig polynomials."""
    if n <= f.degree:
        raise ValueError(f"truncation {n} must exceed the symbol degree {f.degree}")
    j = np.arange(n)
    sums = -(j[:, None] + j[None, :] + 1)
    out = np.zeros((n, n), dtype=np.complex128)
    mask = np.abs(sums) <= f.degree
    out[mask] = f.coeffs[sums[mask] + f.degree]
    return out


def verify_hankel_identity(f: Symbol, g: Symbol, n: int, window: int) -> float:
    """Max-entry residual of [T_f, T_g] = H*_{conj g} H_f - H*_{conj f} H_g
    on the top-left window x window block, where truncation effects vanish."""
    if n < 2 * (f.degree + g.degree):
        raise ValueError(f"need n >= 2 (deg f + deg g) = {2 * (f.degree + g.degree)}")
    if window > n - f.degree - g.degree:
        raise ValueError(
            f"window {window} too large; need <= n - deg f - deg g = "
            f"{n - f.degree - g.degree}")
    tf = toeplitz_matrix(f, n)
    tg = toeplitz_matrix(g, n)
    lhs = tf @ tg - tg @ tf
    hf = hankel_matrix(f, n)
    hg = hankel_matrix(g, n)
    hgbar = hankel_matrix(g.conjugate(), n)
    hfbar = hankel_matrix(f.conjugate(), n)
    rhs = hgbar.conj().T @ hf - hfbar.conj().T @ hg
    return float(np.abs((lhs - rhs)[:window, :window]).max())


def winding_number(f: Symbol, lam: complex, points: int = CURVE_POINTS) -> int:
    """Winding of theta -> f(e^{i theta}) - lam around zero.

    Accumulates argument increments over a fine curve discretization; the
    rounded integer is checked against the raw sum (drift <= 1e-6) and the
    query point must keep distance > 1e-9 from the curve.
    """
    curve = f.curve(points) - lam
    dist = np.abs(curve).min()
    if dist <= CURVE_PROXIMITY:
        raise ValueError(
            f"query point {lam:.6g} lies on the symbol curve (distance {dist:.3g})")
    rolled = np.roll(curve, -1)
    increments = np.angle(rolled / curve)
    total = float(increments.sum() / (2.0 * np.pi))
    wind = int(np.rint(total))
    if abs(total - wind) > WINDING_DRIFT_TOL:
        raise ArithmeticError(
            f"winding accumulation drifted: raw {total}, rounded {wind}")
    return wind


def winding_grid(f: Symbol, xs, ys, points: int = CURVE_POINTS) -> np.ndarray:
    """Winding numbers on a tensor grid by signed ray-crossing counts per row.

    Each closed polyline segment crossing the horizontal line y = ys[r]
    contributes +-1 (by direction) to all grid points left of the crossing;
    grid points within CURVE_PROXIMITY of a crossing get the sentinel filled
    by their right neighbor.  O(rows * curve points + crossings log).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    curve = f.curve(points)
    cx, cy = curve.real, curve.imag
    nx, ny2 = cx, np.roll(cx, -1)
    y1, y2 = cy, np.roll(cy, -1)
    out = np.zeros((ys.size, xs.size), dtype=np.int64)
    for r, y0 in enumerate(ys):
        up = (y1 <= y0) & (y2 > y0)
        dn = (y2 <= y0) & (y1 > y0)
        hit = up | dn
        if not hit.any():
            continue
        t = (y0 - y1[hit]) / (y2[hit] - y1[hit])
        xc = nx[hit] + t * (ny2[hit] - nx[hit])
        sign = np.where(up[hit], 1, -1)
        order = np.argsort(xc)
        xc = xc[order]
        sign = sign[order]
        # winding at x = number of signed crossings strictly to the right
        cum = np.concatenate([np.cumsum(sign[::-1])[::-1], [0]])
        idx = np.searchsorted(xc, xs, side="right")
        out[r, :] = cum[idx]
    return out


@dataclass(frozen=True)
class PrincipalFunction:
    """Integer-valued function on the plane attached to an almost commuting pair.

    Either lazily computed winding numbers of a symbol curve, or an explicit
    region list [(indicator(x, y) -> bool array, value)].  Values vanish on
    the unbounded component; on each complement component of the curve the
    value is minus the Fredholm index of T - lambda.
    """

    symbol: Symbol | None = None
    regions: tuple = ()
    curve_points: int = CURVE_POINTS
    box: tuple | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, x: float, y: float) -> int:
        if self.symbol is not None:
            key = (float(x), float(y))
            if key not in self._cache:
                self._cache[key] = winding_number(self.symbol, complex(x, y),
                                                  self.curve_points)
            return self._cache[key]
        for indicator, value in self.regions:
            if np.asarray(indicator(np.asarray(x), np.asarray(y))).item():
                return value
        return 0

    def on_grid(self, xs, ys) -> np.ndarray:
        """Values g(x, y) as an array of shape (len(ys), len(xs)); cached."""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if self.symbol is not None:
            key = (xs.tobytes(), ys.tobytes())
            if key not in self._cache:
                self._cache[key] = winding_grid(self.symbol, xs, ys, self.curve_points)
            return self._cache[key]
        out = np.zeros((ys.size, xs.size))
        gx, gy = np.meshgrid(xs, ys)
        for indicator, value in self.regions:
            out = np.where(np.asarray(indicator(gx, gy)), value, out)
        return out

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax) covering the support of g."""
        if self.box is not None:
            return self.box
        if self.symbol is not None:
            curve = self.symbol.curve(self.curve_points)
            pad = 1e-6 + 1e-3 * (np.abs(curve).max() + 1.0)
            return (float(curve.real.min() - pad), float(curve.real.max() + pad),
                    float(curve.imag.min() - pad), float(curve.imag.max() + pad))
        return (-1.0, 1.0, -1.0, 1.0)


def disk_principal_function(radius: float = 1.0, value: int = 1,
                            center: complex = 0.0) -> PrincipalFunction:
    """Explicit region-list principal function: value on an open disk."""
    c = complex(center)

    def indicator(x, y):
        return (np.asarray(x) - c.real) ** 2 + (np.asarray(y) - c.imag) ** 2 < radius ** 2

    return PrincipalFunction(
        symbol=None, regions=((indicator, value),),
        box=(c.real - radius, c.real + radius, c.imag - radius, c.imag + radius))


def principal_function(f: Symbol) -> PrincipalFunction:
    """Principal function of the pair (T_{Re f}, T_{Im f}): winding of f - lambda."""
    return PrincipalFunction(symbol=f)
