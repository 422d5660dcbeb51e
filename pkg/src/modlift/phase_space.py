"""Finite phase space Z_n x Z_n and its exact transforms.

Everything in this module lives on the cyclic group Z_n with n odd, so that
2 is invertible modulo n and the half-shifts ``x +/- y/2`` of the Wigner
distribution are realized exactly by multiplication with ``half = 2^{-1} mod n``.

Normalizations
--------------
* ``dft`` is unitary: ``fhat(xi) = n^{-1/2} sum_y f(y) e^{-2 pi i y xi / n}``.
* ``stft`` carries ``n^{-1/2}``; ``V_phi f(x, xi) = n^{-1/2} <f, phi_{x,xi}>``.
* ``symplectic_fourier`` carries ``n^{-1}`` and uses the doubled symplectic
  phase ``e^{4 pi i sigma(Y, Z) / n}``, the finite counterpart of ``e^{2 i sigma}``.

Arrays indexed by (x, xi) use axis 0 for x and axis 1 for xi.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateWindowError, GridMismatchError, ParameterError

__all__ = [
    "Grid",
    "Signal",
    "PhaseFn",
    "dft",
    "idft",
    "stft",
    "stft_factorized",
    "reconstruct",
    "wigner",
    "symplectic_fourier",
    "symplectic_stft",
    "stft_wigner_phase",
    "tf_shift",
    "tf_atoms",
    "reflect",
    "shift_phase_fn",
    "delta_signal",
    "delta_phase_fn",
    "random_signal",
    "random_phase_fn",
]


@dataclass(frozen=True)
class Grid:
    """The cyclic group Z_n, n odd and at least 3."""

    n: int

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or int(n) != n:
            raise ParameterError(f"grid modulus must be an integer, got {n!r}")
        object.__setattr__(self, "n", int(n))
        if self.n < 3 or self.n % 2 == 0:
            raise ParameterError(f"grid modulus must be odd and >= 3, got {self.n}")

    @property
    def half(self) -> int:
        """Multiplicative inverse of 2 modulo n."""
        return (self.n + 1) // 2

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.n)

    def torus_abs(self, k) -> np.ndarray:
        """Cyclic distance to zero, ``min(k mod n, n - k mod n)``."""
        k = np.mod(k, self.n)
        return np.minimum(k, self.n - k)

    def bracket(self) -> np.ndarray:
        """<X> = (1 + |x|_n^2 + |xi|_n^2)^{1/2} as an (n, n) array."""
        a = self.torus_abs(self.points).astype(float)
        return np.sqrt(1.0 + a[:, None] ** 2 + a[None, :] ** 2)


def _frozen(values, dtype, shape, what):
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.shape != shape:
        raise GridMismatchError(f"{what} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{what} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Signal:
    """Complex vector on Z_n."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.grid.n
        object.__setattr__(self, "values", _frozen(self.values, complex, (n,), "signal"))

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __add__(self, other):
        _same_grid(self, other)
        return Signal(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return Signal(self.grid, self.values - other.values)

    def __mul__(self, c):
        return Signal(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class PhaseFn:
    """Complex function on phase space Z_n x Z_n, indexed (x, xi)."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.grid.n
        object.__setattr__(self, "values", _frozen(self.values, complex, (n, n), "phase function"))

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def conj(self) -> "PhaseFn":
        return PhaseFn(self.grid, np.conj(self.values))

    def __add__(self, other):
        _same_grid(self, other)
        return PhaseFn(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return PhaseFn(self.grid, self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, PhaseFn):
            _same_grid(self, c)
            return PhaseFn(self.grid, self.values * c.values)
        return PhaseFn(self.grid, self.values * c)

    __rmul__ = __mul__


def _same_grid(*objs):
    g = objs[0].grid
    for o in objs[1:]:
        if o.grid != g:
            raise GridMismatchError(f"grid mismatch: n={g.n} vs n={o.grid.n}")
    return g


def _dft_matrix(n: int, sign: int = -1, mult: int = 1) -> np.ndarray:
    k = np.arange(n)
    # reduce mod n before scaling so phases are exact multiples of 2 pi / n
    return np.exp(sign * 2j * np.pi * (mult * np.outer(k, k) % n) / n)


def dft(f: Signal) -> Signal:
    """Unitary DFT on Z_n."""
    n = f.grid.n
    return Signal(f.grid, np.fft.fft(f.values) / np.sqrt(n))


def idft(f: Signal) -> Signal:
    n = f.grid.n
    return Signal(f.grid, np.fft.ifft(f.values) * np.sqrt(n))


def _check_window(phi, what="window", warn_only=False):
    nrm = np.linalg.norm(phi.values)
    if nrm == 0.0:
        if warn_only:
            warnings.warn(f"{what} is identically zero", RuntimeWarning, stacklevel=3)
            return nrm
        raise DegenerateWindowError(f"{what} is identically zero")
    if nrm < 1e-14:
        warnings.warn(f"{what} has tiny norm {nrm:.3g}", RuntimeWarning, stacklevel=3)
    return nrm


def _shift_table(phi: np.ndarray) -> np.ndarray:
    """``S[x, y] = phi(y - x)``."""
    n = phi.shape[-1]
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return phi[..., idx]


def stft(f: Signal, phi: Signal) -> PhaseFn:
    """Short-time Fourier transform ``V_phi f(x, xi)``.

    Evaluated as the inner products ``n^{-1/2} <f, phi_{x,xi}>`` against the
    explicit DFT matrix.
    """
    grid = _same_grid(f, phi)
    _check_window(phi, warn_only=True)
    n = grid.n
    A = f.values[None, :] * np.conj(_shift_table(phi.values))
    E = _dft_matrix(n, -1)
    return PhaseFn(grid, A @ E.T / np.sqrt(n))


def _stft_batch(fs: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """STFTs of the rows of ``fs`` (shape (S, n)) -> (S, n, n)."""
    n = phi.shape[0]
    A = fs[:, None, :] * np.conj(_shift_table(phi))[None, :, :]
    return np.fft.fft(A, axis=-1) / np.sqrt(n)


def stft_factorized(f: Signal, phi: Signal) -> PhaseFn:
    """STFT as a partial Fourier transform of ``U(f (x) conj(phi))``.

    ``U`` maps ``F(x, y)`` to ``F(y, y - x)``; the y-axis is then transformed
    with the FFT.
    """
    grid = _same_grid(f, phi)
    _check_window(phi, warn_only=True)
    n = grid.n
    tensor = np.outer(f.values, np.conj(phi.values))  # F(y, y') = f(y) conj(phi(y'))
    y = np.arange(n)
    U = tensor[y[None, :], (y[None, :] - y[:, None]) % n]
    return PhaseFn(grid, np.fft.fft(U, axis=1) / np.sqrt(n))


def tf_shift(phi: Signal, x: int, xi: int) -> Signal:
    """``phi_{x,xi}(y) = e^{2 pi i y xi / n} phi(y - x)``."""
    n = phi.grid.n
    y = np.arange(n)
    return Signal(phi.grid, np.exp(2j * np.pi * (y * xi % n) / n) * phi.values[(y - x) % n])


def tf_atoms(phi: np.ndarray) -> np.ndarray:
    """All time-frequency shifts of ``phi``: ``G[x, xi, y] = phi_{x,xi}(y)``."""
    n = phi.shape[0]
    y = np.arange(n)
    mod = np.exp(2j * np.pi * (np.outer(np.arange(n), y) % n) / n)  # [xi, y]
    return mod[None, :, :] * _shift_table(phi)[:, None, :]


def reconstruct(V: PhaseFn, phi: Signal) -> Signal:
    """Synthesis ``(n^{1/2} ||phi||^2)^{-1} sum_{x,xi} V(x, xi) phi_{x,xi}``."""
    grid = _same_grid(V, phi)
    nrm = _check_window(phi)
    n = grid.n
    # sum_xi V(x, xi) e^{2 pi i y xi/n} = n * ifft over xi, evaluated at y
    inner = np.fft.ifft(V.values, axis=1) * n  # [x, y]
    out = np.sum(inner * _shift_table(phi.values), axis=0)
    return Signal(grid, out / (np.sqrt(n) * nrm**2))


def wigner(f: Signal, g: Signal) -> PhaseFn:
    """Cross-Wigner distribution.

    ``W(x, xi) = n^{-1/2} sum_y f(x + half y) conj(g(x - half y)) e^{-2 pi i y xi / n}``.
    """
    grid = _same_grid(f, g)
    n, h = grid.n, grid.half
    x = np.arange(n)[:, None]
    y = np.arange(n)[None, :]
    A = f.values[(x + h * y) % n] * np.conj(g.values[(x - h * y) % n])
    return PhaseFn(grid, np.fft.fft(A, axis=1) / np.sqrt(n))


def symplectic_fourier(a: PhaseFn) -> PhaseFn:
    """``(F_sigma a)(y, eta) = n^{-1} sum a(z, zeta) e^{4 pi i (eta z - y zeta) / n}``.

    A unitary involution on l^2(Z_n x Z_n).
    """
    n = a.grid.n
    E2 = _dft_matrix(n, +1, 2)  # E2[eta, z] = e^{4 pi i eta z / n}
    M = E2 @ a.values  # [eta, zeta]
    return PhaseFn(a.grid, np.conj(E2) @ M.T / n)


def _symplectic_fourier_array(a: np.ndarray) -> np.ndarray:
    """F_sigma over the last two axes of a stacked array."""
    n = a.shape[-1]
    E2 = _dft_matrix(n, +1, 2)
    M = np.einsum("ez,...zk->...ek", E2, a)
    return np.einsum("yk,...ek->...ye", np.conj(E2), M) / n


def shift_phase_fn(a: np.ndarray, X) -> np.ndarray:
    """``a(. - X)`` for an (n, n) array."""
    return np.roll(a, shift=(int(X[0]), int(X[1])), axis=(0, 1))


def symplectic_stft(a: PhaseFn, psi: PhaseFn) -> np.ndarray:
    """Symplectic STFT ``V_psi a(X, Y) = F_sigma(a conj(psi(. - X)))(Y)``.

    Returns an array of shape (n, n, n, n) indexed ``[x, xi, y, eta]``.
    Energy: ``sum |V_psi a|^2 = ||a||^2 ||psi||^2`` (constant 1 with these
    normalizations).
    """
    grid = _same_grid(a, psi)
    if not np.any(psi.values):
        raise DegenerateWindowError("symplectic window is identically zero")
    n = grid.n
    i = np.arange(n)
    # P[x, xi, z, zeta] = psi(z - x, zeta - xi)
    P = psi.values[(i[None, None, :, None] - i[:, None, None, None]) % n,
                   (i[None, None, None, :] - i[None, :, None, None]) % n]
    prod = a.values[None, None, :, :] * np.conj(P)
    return _symplectic_fourier_array(prod)


def stft_wigner_phase(grid: Grid) -> np.ndarray:
    """Unimodular array P with ``stft(f, g)(x, xi) = P(x, xi) W_{fcheck, g}(-half x, -half xi)``.

    ``P(x, xi) = e^{-2 pi i half x xi / n}``; the global constant is 1.
    """
    n, h = grid.n, grid.half
    i = np.arange(n)
    return np.exp(-2j * np.pi * ((h * np.outer(i, i)) % n) / n)


def reflect(f: Signal) -> Signal:
    """``fcheck(x) = f(-x)``."""
    n = f.grid.n
    return Signal(f.grid, f.values[(-np.arange(n)) % n])


def delta_signal(grid: Grid, k: int = 0) -> Signal:
    v = np.zeros(grid.n, complex)
    v[k % grid.n] = 1.0
    return Signal(grid, v)


def delta_phase_fn(grid: Grid, x: int = 0, xi: int = 0) -> PhaseFn:
    v = np.zeros((grid.n, grid.n), complex)
    v[x % grid.n, xi % grid.n] = 1.0
    return PhaseFn(grid, v)


def random_signal(grid: Grid, rng: np.random.Generator) -> Signal:
    """Standard complex Gaussian entries (E|f(x)|^2 = 1)."""
    z = rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n)
    return Signal(grid, z / np.sqrt(2.0))


def random_phase_fn(grid: Grid, rng: np.random.Generator, real: bool = False) -> PhaseFn:
    shape = (grid.n, grid.n)
    z = rng.standard_normal(shape)
    if not real:
        z = (z + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return PhaseFn(grid, z)
