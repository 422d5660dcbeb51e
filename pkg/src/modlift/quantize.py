"""Exact pseudo-differential calculus on Z_n.

``Op_t(a)`` has kernel ``K(x, y) = n^{-1} sum_xi a(m_t(x, y), xi) e^{2 pi i (x - y) xi / n}``
with ``m_t(x, y) = (1 - t) x + t y`` for t in {0, 1/2, 1}; t = 1/2 uses
``half (x + y)``.  Because the substitution ``(x, y) -> (m_t, x - y)`` is a
bijection of Z_n x Z_n, quantization is invertible and every composition
identity of the calculus holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import constants
from .errors import DegenerateWindowError, GridMismatchError, ParameterError
from .phase_space import (Grid, PhaseFn, Signal, _frozen, _same_grid, symplectic_stft,
                          tf_atoms, wigner)
from .weights import DoubleWeight, Weight, _cyclic_convolve

__all__ = [
    "LinOp",
    "TParam",
    "quantize",
    "symbol_of",
    "calculus_transform",
    "weyl_product",
    "twisted_convolution",
    "toeplitz",
    "toeplitz_via_weyl",
    "m_infty1_norm",
    "s_omega_seminorms",
]


@dataclass(frozen=True)
class LinOp:
    """Linear operator on signals over Z_n, stored as an (n, n) matrix."""

    grid: Grid
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.grid.n
        object.__setattr__(self, "matrix", _frozen(self.matrix, complex, (n, n), "operator"))

    def __matmul__(self, other):
        if isinstance(other, LinOp):
            _same_grid(self, other)
            return LinOp(self.grid, self.matrix @ other.matrix)
        if isinstance(other, Signal):
            _same_grid(self, other)
            return Signal(self.grid, self.matrix @ other.values)
        return NotImplemented

    def __add__(self, other):
        _same_grid(self, other)
        return LinOp(self.grid, self.matrix + other.matrix)

    def __sub__(self, other):
        _same_grid(self, other)
        return LinOp(self.grid, self.matrix - other.matrix)

    def __mul__(self, c):
        return LinOp(self.grid, self.matrix * c)

    __rmul__ = __mul__

    def adjoint(self) -> "LinOp":
        return LinOp(self.grid, self.matrix.conj().T)

    @classmethod
    def identity(cls, grid: Grid) -> "LinOp":
        return cls(grid, np.eye(grid.n))


class TParam:
    """Quantization parameter t in {0, 1/2, 1}."""

    ALLOWED = (Fraction(0), Fraction(1, 2), Fraction(1))

    def __init__(self, t):
        if isinstance(t, TParam):
            t = t.t
        try:
            exact = Fraction(t)
        except (TypeError, ValueError):
            raise ParameterError(f"t must be one of 0, 1/2, 1; got {t!r}") from None
        frac = exact.limit_denominator(2)
        if frac not in self.ALLOWED or abs(float(frac) - float(exact)) > 1e-12:
            raise ParameterError(f"t must be one of 0, 1/2, 1; got {t!r}")
        self.t = frac

    def __eq__(self, other):
        return isinstance(other, TParam) and other.t == self.t

    def __hash__(self):
        return hash(self.t)

    def __repr__(self):
        return f"TParam({self.t})"

    def coefficients(self, grid: Grid) -> tuple[int, int]:
        """Integers (p, q) mod n with ``x = z + p d`` and ``y = z - q d``."""
        if self.t == 0:
            return 0, 1
        if self.t == 1:
            return 1, 0
        return grid.half, grid.half

    def midpoint(self, grid: Grid, x, y):
        if self.t == 0:
            return x % grid.n
        if self.t == 1:
            return y % grid.n
        return (grid.half * (x + y)) % grid.n


WEYL = TParam(Fraction(1, 2))


def quantize(a: PhaseFn, t=WEYL) -> LinOp:
    """``Op_t(a)`` as a matrix."""
    t = TParam(t)
    grid = a.grid
    n = grid.n
    # partial inverse DFT in xi: B[z, d] = n^{-1} sum_xi a(z, xi) e^{2 pi i d xi / n}
    B = np.fft.ifft(a.values, axis=1)
    x = np.arange(n)[:, None]
    y = np.arange(n)[None, :]
    return LinOp(grid, B[t.midpoint(grid, x, y), (x - y) % n])


def symbol_of(T: LinOp, t=WEYL) -> PhaseFn:
    """The unique symbol a with ``Op_t(a) = T``."""
    t = TParam(t)
    grid = T.grid
    n = grid.n
    p, q = t.coefficients(grid)
    z = np.arange(n)[:, None]
    d = np.arange(n)[None, :]
    B = T.matrix[(z + p * d) % n, (z - q * d) % n]
    return PhaseFn(grid, np.fft.fft(B, axis=1))


def calculus_transform(a: PhaseFn, s, t) -> PhaseFn:
    """Symbol b with ``Op_t(b) = Op_s(a)``."""
    s, t = TParam(s), TParam(t)
    if s == t:
        return a
    return symbol_of(quantize(a, s), t)


def weyl_product(a: PhaseFn, b: PhaseFn) -> PhaseFn:
    """``a # b``: the Weyl symbol of ``Op^w(a) Op^w(b)``."""
    _same_grid(a, b)
    return symbol_of(quantize(a, WEYL) @ quantize(b, WEYL), WEYL)


def twisted_convolution(a: PhaseFn, b: PhaseFn) -> PhaseFn:
    """``(a *_sigma b)(x, xi) = kappa sum a(x-y, xi-eta) b(y, eta) e^{4 pi i (y xi - x eta)/n}``.

    With ``kappa = n^{-1}`` this is the symplectic-Fourier image of ``#``:
    ``F_sigma(a # b) = F_sigma a *_sigma F_sigma b``.
    """
    grid = _same_grid(a, b)
    n = grid.n
    kappa = constants.twisted_kappa(n)
    i = np.arange(n)
    out = np.zeros((n, n), complex)
    av, bv = a.values, b.values
    row = np.exp(-2j * np.pi * ((2 * np.outer(i, i)) % n) / n)  # [x, eta]
    for y in range(n):
        col = np.exp(2j * np.pi * ((2 * y * i) % n) / n)  # [xi]
        shifted_rows = np.roll(av, y, axis=0)
        for eta in range(n):
            if bv[y, eta] == 0:
                continue
            out += (np.roll(shifted_rows, eta, axis=1) * bv[y, eta]
                    * row[:, eta][:, None] * col[None, :])
    return PhaseFn(grid, kappa * out)


def _window_norm(phi: Signal) -> float:
    nrm = phi.norm()
    if nrm == 0.0:
        raise DegenerateWindowError("window is identically zero")
    return nrm


def toeplitz(phi: Signal, a: PhaseFn) -> LinOp:
    """Localization operator ``n^{-1} sum_X a(X) |phi_X><phi_X|``.

    Satisfies ``<Tf, g> = sum_X a(X) V_phi f(X) conj(V_phi g(X))``.
    """
    grid = _same_grid(phi, a)
    _window_norm(phi)
    n = grid.n
    G = tf_atoms(phi.values).reshape(n * n, n)
    T = (G.T * a.values.reshape(-1)) @ np.conj(G) / n
    return LinOp(grid, T)


def toeplitz_via_weyl(phi: Signal, a: PhaseFn) -> LinOp:
    """Toeplitz operator as the Weyl quantization of ``kappa2 (a * W_{phi,phi})``."""
    grid = _same_grid(phi, a)
    _window_norm(phi)
    W = wigner(phi, phi).values
    sym = constants.toeplitz_weyl_kappa(grid.n) * _cyclic_convolve(a.values, W)
    return quantize(PhaseFn(grid, sym), WEYL)


def m_infty1_norm(a: PhaseFn, v: DoubleWeight, psi: PhaseFn) -> float:
    """``sum_Y max_X |V_psi a(X, Y)| v(X, Y)``."""
    _same_grid(a, psi)
    if v.grid != a.grid:
        raise GridMismatchError("weight and symbol live on different grids")
    V = np.abs(symplectic_stft(a, psi)) * v.values
    n = a.grid.n
    return float(np.sum(V.reshape(n * n, n * n).max(axis=0)))


def s_omega_seminorms(a: PhaseFn, omega: Weight, K: int = 2) -> float:
    """``max_{|alpha| <= K} sup_X |Delta^alpha a(X)| / omega(X)``, cyclic forward differences."""
    if K < 0:
        raise ParameterError("K must be nonnegative")
    if omega.grid != a.grid:
        raise GridMismatchError("weight and symbol live on different grids")
    best = 0.0
    by_x = a.values
    for ax in range(K + 1):
        cur = by_x
        for _ in range(K + 1 - ax):
            best = max(best, float(np.max(np.abs(cur) / omega.values)))
            cur = np.roll(cur, -1, axis=1) - cur
        by_x = np.roll(by_x, -1, axis=0) - by_x
    return best
