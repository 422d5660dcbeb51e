"""Moderate weights on the finite phase space.

Polynomial weights use the torus bracket ``<X> = (1 + |x|_n^2 + |xi|_n^2)^{1/2}``.
Gaussians use symplectic units: a lattice step corresponds to
``(2 pi / n)^{1/2}`` in both x and xi, so that ``Phi_mu`` with
``mu1 * mu2 = 1`` is the Gaussian whose window is DFT-invariant.

Weights on phase space are (n, n) arrays; weights on the doubled space
(X, Y) are (n, n, n, n) arrays indexed ``[x, xi, y, eta]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, ParameterError, SpecParseError
from .phase_space import Grid, _frozen

__all__ = [
    "Weight",
    "DoubleWeight",
    "polynomial_weight",
    "gaussian_phase_weight",
    "periodized_gaussian",
    "convolve",
    "moderate_constant",
    "submultiplicative_constant",
    "equivalence_constants",
    "omega_0t",
    "corweyl_weights",
    "omega3_weight",
    "weyl_product_weight_check",
    "parse_weight_spec",
    "doubled",
]

#: relative size below which an image shift of a periodized Gaussian is dropped
PERIODIZATION_TOL = 1e-16


@dataclass(frozen=True)
class Weight:
    """Strictly positive function on Z_n x Z_n."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.grid.n
        arr = _frozen(np.real_if_close(self.values), float, (n, n), "weight")
        if not np.all(arr > 0):
            raise ParameterError("weight must be strictly positive")
        object.__setattr__(self, "values", arr)

    def _other(self, other):
        if isinstance(other, Weight):
            if other.grid != self.grid:
                raise GridMismatchError("weights live on different grids")
            return other.values
        return other

    def __mul__(self, other):
        return Weight(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Weight(self.grid, self.values / self._other(other))

    def __rtruediv__(self, other):
        return Weight(self.grid, other / self.values)

    def __pow__(self, r):
        return Weight(self.grid, self.values ** float(r))

    def reciprocal(self) -> "Weight":
        return Weight(self.grid, 1.0 / self.values)

    def sqrt(self) -> "Weight":
        return Weight(self.grid, np.sqrt(self.values))

    def at(self, x, xi) -> float:
        n = self.grid.n
        return float(self.values[x % n, xi % n])


@dataclass(frozen=True)
class DoubleWeight:
    """Strictly positive function of (X, Y) in (Z_n x Z_n)^2."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.grid.n
        arr = _frozen(self.values, float, (n, n, n, n), "double weight")
        if not np.all(arr > 0):
            raise ParameterError("double weight must be strictly positive")
        object.__setattr__(self, "values", arr)

    def __mul__(self, c):
        if isinstance(c, DoubleWeight):
            return DoubleWeight(self.grid, self.values * c.values)
        return DoubleWeight(self.grid, self.values * c)

    __rmul__ = __mul__


def polynomial_weight(grid: Grid, s: float) -> Weight:
    """``v_s(X) = <X>^s`` with the torus bracket."""
    return Weight(grid, grid.bracket() ** float(s))


def periodized_gaussian(grid: Grid, lam: float) -> np.ndarray:
    """``sum_k exp(-lam (2 pi / n) (x + k n)^2)`` on Z_n, exactly even.

    Images are added in symmetric pairs until the largest relative
    contribution falls below ``PERIODIZATION_TOL``.  Values that underflow
    are clamped to the smallest positive normal double.
    """
    if not lam > 0:
        raise ParameterError(f"Gaussian parameter must be positive, got {lam}")
    n = grid.n
    c = lam * 2.0 * np.pi / n
    d = grid.torus_abs(grid.points).astype(float)
    total = np.exp(-c * d**2)
    k = 1
    while True:
        term = np.exp(-c * (d + k * n) ** 2) + np.exp(-c * (d - k * n) ** 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(total > 0, term / total, np.where(term > 0, np.inf, 0.0))
        total = total + term
        if np.max(rel) < PERIODIZATION_TOL:
            break
        k += 1
    return np.maximum(total, np.finfo(float).tiny)


def gaussian_phase_weight(grid: Grid, lam1: float, lam2: float) -> Weight:
    """Periodized phase-space Gaussian ``Phi_lambda`` normalized to mass n^2."""
    if not (lam1 > 0 and lam2 > 0):
        raise ParameterError(f"Gaussian parameters must be positive, got ({lam1}, {lam2})")
    g = np.outer(periodized_gaussian(grid, lam1), periodized_gaussian(grid, lam2))
    n2 = grid.n**2
    return Weight(grid, np.maximum(g * (n2 / g.sum()), np.finfo(float).tiny))


def _cyclic_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``sum_Z a(X - Z) b(Z)`` by direct summation (no FFT round-off)."""
    n = a.shape[0]
    i = np.arange(n)
    circ = (i[None, :] - i[:, None]) % n  # circ[zeta, xi] = xi - zeta
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    for z in range(n):
        out += np.roll(a, z, axis=0) @ b[z][circ]
    return out


def convolve(omega: Weight, phi: Weight) -> Weight:
    """``(omega (*) Phi)(X) = n^{-2} sum_Z omega(X - Z) Phi(Z)``."""
    if omega.grid != phi.grid:
        raise GridMismatchError("weights live on different grids")
    n = omega.grid.n
    out = _cyclic_convolve(omega.values, phi.values) / n**2
    return Weight(omega.grid, np.maximum(out, np.finfo(float).tiny))


def _max_ratio_over_shifts(num, den_x, vY, shifts):
    """max over X and the listed Y of num(X + Y) / (den_x(X) vY(Y))."""
    best = 0.0
    for y, eta in shifts:
        shifted = np.roll(num, (-y, -eta), axis=(0, 1))
        r = float(np.max(shifted / den_x)) / vY[y, eta]
        if r > best:
            best = r
    return best


def moderate_constant(omega: Weight, v: Weight, max_exhaustive: int = 65,
                      num_samples: int = 4096, seed: int = 0) -> float:
    """Smallest C with ``omega(X + Y) <= C omega(X) v(Y)``.

    Exhaustive over all Y (and, vectorized, all X) for ``n <= max_exhaustive``;
    above that a seeded sample of Y is searched, giving a lower bound.
    """
    if omega.grid != v.grid:
        raise GridMismatchError("weights live on different grids")
    n = omega.grid.n
    if n <= max_exhaustive:
        shifts = [(y, eta) for y in range(n) for eta in range(n)]
    else:
        rng = np.random.default_rng(seed)
        pts = rng.integers(0, n, size=(num_samples, 2))
        shifts = [(0, 0)] + [tuple(map(int, p)) for p in pts]
    return _max_ratio_over_shifts(omega.values, omega.values, v.values, shifts)


def submultiplicative_constant(v: Weight, **kwargs) -> tuple[float, bool]:
    """Smallest C with ``v(X + Y) <= C v(X) v(Y)``, and whether v is even."""
    C = moderate_constant(v, v, **kwargs)
    vals = v.values
    n = v.grid.n
    neg = vals[(-np.arange(n)) % n][:, (-np.arange(n)) % n]
    return C, bool(np.array_equal(vals, neg))


def equivalence_constants(omega1: Weight, omega2: Weight) -> tuple[float, float]:
    """``(min omega1/omega2, max omega1/omega2)``."""
    if omega1.grid != omega2.grid:
        raise GridMismatchError("weights live on different grids")
    r = omega1.values / omega2.values
    return float(r.min()), float(r.max())


def doubled(w: Weight) -> np.ndarray:
    """``w(2Y)`` as an (n, n) array (doubling is a bijection for odd n)."""
    n = w.grid.n
    idx = (2 * np.arange(n)) % n
    return w.values[idx][:, idx]


def _sum_diff_index(n):
    i = np.arange(n)
    return (i[:, None] + i[None, :]) % n, (i[:, None] - i[None, :]) % n


def omega_0t(omega0: Weight, v1: Weight, t: float) -> DoubleWeight:
    """``omega_{0,t}(X, Y) = v1(2Y)^{t-1} omega0(X)``."""
    if not 0.0 <= t <= 1.0:
        raise ParameterError(f"t must lie in [0, 1], got {t}")
    if omega0.grid != v1.grid:
        raise GridMismatchError("weights live on different grids")
    vals = omega0.values[:, :, None, None] * (doubled(v1) ** (t - 1.0))[None, None, :, :]
    return DoubleWeight(omega0.grid, vals)


def _theta_pm(theta: np.ndarray):
    """theta(X + Y) and theta(X - Y) as (n, n, n, n) arrays."""
    n = theta.shape[0]
    s, d = _sum_diff_index(n)  # s[x, y] = x + y, d[x, y] = x - y
    plus = theta[s[:, None, :, None], s[None, :, None, :]]
    minus = theta[d[:, None, :, None], d[None, :, None, :]]
    return plus, minus


def corweyl_weights(omega0: Weight, v0: Weight, v1: Weight):
    """Weights (theta, omega1, omega2, v2) used for Weyl products with Toeplitz symbols.

    ``theta = omega0^{1/2}``,
    ``omega1(X, Y) = v0(2Y)^{1/2} v1(2Y) / (theta(X+Y) theta(X-Y))``,
    ``omega2(X, Y) = theta(X-Y) theta(X+Y) v1(2Y)``,
    ``v2(X, Y) = v1(2Y)``.
    """
    grid = omega0.grid
    if v0.grid != grid or v1.grid != grid:
        raise GridMismatchError("weights live on different grids")
    theta = omega0.sqrt()
    plus, minus = _theta_pm(theta.values)
    v0_2y = doubled(v0)[None, None, :, :]
    v1_2y = doubled(v1)[None, None, :, :]
    n = grid.n
    omega1 = DoubleWeight(grid, np.sqrt(v0_2y) * v1_2y / (plus * minus))
    omega2 = DoubleWeight(grid, minus * plus * v1_2y)
    v2 = DoubleWeight(grid, np.broadcast_to(v1_2y, (n, n, n, n)))
    return theta, omega1, omega2, v2


def omega3_weight(theta: Weight) -> DoubleWeight:
    """``theta(X + Y) / theta(X - Y)``, the target weight of ``b # d``."""
    plus, minus = _theta_pm(theta.values)
    return DoubleWeight(theta.grid, plus / minus)


def weyl_product_weight_check(omega0: DoubleWeight, omega1: DoubleWeight, omega2: DoubleWeight,
                              mode: str = "exhaustive", num_samples: int = 2000,
                              seed: int = 0) -> float:
    """Smallest C with ``omega0(X,Y) <= C omega1(X-Y+Z, Z) omega2(X+Z, Y-Z)``.

    ``C = max_{X,Y} omega0(X,Y) / min_Z [omega1(X-Y+Z, Z) omega2(X+Z, Y-Z)]``.
    Exhaustive mode visits all n^6 triples and is limited to n <= 9; sampled
    mode draws ``num_samples`` seeded pairs (X, Y) and minimizes over every Z.
    """
    grid = omega0.grid
    if omega1.grid != grid or omega2.grid != grid:
        raise GridMismatchError("double weights live on different grids")
    n = grid.n
    N = n * n
    w0 = omega0.values.reshape(N, N)
    w1 = omega1.values.reshape(N, N)
    w2 = omega2.values.reshape(N, N)
    pts = np.array([(x, xi) for x in range(n) for xi in range(n)])

    def flat(p):
        return (p[..., 0] % n) * n + (p[..., 1] % n)

    if mode == "exhaustive":
        if n > 9:
            raise ParameterError("exhaustive triple search is restricted to n <= 9")
        pairs = [(X, Y) for X in range(N) for Y in range(N)]
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        pairs = list(zip(rng.integers(0, N, num_samples), rng.integers(0, N, num_samples)))
    else:
        raise ParameterError(f"unknown search mode {mode!r}")

    Z = pts  # (N, 2)
    Zf = flat(Z)
    best = 0.0
    for X, Y in pairs:
        Xp, Yp = pts[X], pts[Y]
        first = w1[flat(Xp - Yp + Z), Zf]
        second = w2[flat(Xp + Z), flat(Yp - Z)]
        r = w0[X, Y] / float(np.min(first * second))
        if r > best:
            best = r
    return best


class _SpecParser:
    """Recursive-descent parser for prefix weight specs.

    Grammar::

        spec  := "poly:" num | "gauss:" num "," num | "const:" num
               | "conv:" spec "|" spec | "prod:" spec "|" spec
               | "recip:" spec | "pow:" num "|" spec
    """

    def __init__(self, text, grid):
        self.text = text.strip()
        self.pos = 0
        self.grid = grid

    def error(self, msg):
        raise SpecParseError(f"bad weight spec {self.text!r} at position {self.pos}: {msg}")

    def expect(self, s):
        if not self.text.startswith(s, self.pos):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def number(self):
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in "|,":
            self.pos += 1
        tok = self.text[start:self.pos].strip()
        try:
            return float(tok)
        except ValueError:
            self.error(f"expected a number, got {tok!r}")

    def spec(self):
        head_end = self.text.find(":", self.pos)
        if head_end < 0:
            self.error("missing ':'")
        head = self.text[self.pos:head_end].strip()
        self.pos = head_end + 1
        g = self.grid
        if head == "poly":
            return polynomial_weight(g, self.number())
        if head == "const":
            c = self.number()
            if not c > 0:
                self.error("constant weight must be positive")
            return Weight(g, np.full((g.n, g.n), c))
        if head == "gauss":
            l1 = self.number()
            self.expect(",")
            l2 = self.number()
            try:
                return gaussian_phase_weight(g, l1, l2)
            except ParameterError as exc:
                self.error(str(exc))
        if head in ("conv", "prod"):
            a = self.spec()
            self.expect("|")
            b = self.spec()
            return convolve(a, b) if head == "conv" else a * b
        if head == "recip":
            return self.spec().reciprocal()
        if head == "pow":
            r = self.number()
            self.expect("|")
            return self.spec() ** r
        self.error(f"unknown weight kind {head!r}")

    def parse(self):
        w = self.spec()
        if self.pos != len(self.text):
            self.error("trailing characters")
        return w


def parse_weight_spec(text: str, grid: Grid) -> Weight:
    """Build a weight from a spec string such as ``"conv:poly:2|gauss:1,1"``."""
    return _SpecParser(text, grid).parse()
