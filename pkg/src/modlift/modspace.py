"""Weighted mixed norms and modulation-space norms on Z_n x Z_n."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWindowError, GridMismatchError, ParameterError, SpecParseError
from .phase_space import Grid, PhaseFn, Signal, _stft_batch, reconstruct, stft
from .quantize import WEYL, quantize
from .weights import Weight

__all__ = [
    "MixedExponents",
    "mixed_norm",
    "amalgam_norm",
    "mod_norm",
    "mod_norms",
    "window_equivalence",
    "dual_norm_lower_bound",
    "holder_extremal",
    "h_omega_norm",
    "h_omega_norms",
    "bump",
]

INF = math.inf


@dataclass(frozen=True)
class MixedExponents:
    p: float
    q: float

    def __post_init__(self):
        for name in ("p", "q"):
            val = float(getattr(self, name))
            if not (1.0 <= val <= INF):
                raise ParameterError(f"exponent {name}={val} outside [1, inf]")
            object.__setattr__(self, name, val)

    @staticmethod
    def _conj(r):
        if r == 1.0:
            return INF
        if r == INF:
            return 1.0
        return r / (r - 1.0)

    def conjugate(self) -> "MixedExponents":
        return MixedExponents(self._conj(self.p), self._conj(self.q))

    @classmethod
    def parse(cls, text: str) -> "MixedExponents":
        """Parse ``"p,q"``; ``inf`` is accepted for either exponent."""
        parts = [s.strip().lower() for s in str(text).split(",")]
        if len(parts) != 2:
            raise SpecParseError(f"exponent spec must be 'p,q', got {text!r}")
        try:
            vals = [INF if s in ("inf", "infinity") else float(s) for s in parts]
            return cls(*vals)
        except (ValueError, ParameterError) as exc:
            raise SpecParseError(f"bad exponent spec {text!r}: {exc}") from None

    def label(self) -> str:
        return ",".join("inf" if r == INF else format(r, "g") for r in (self.p, self.q))


def _lp(arr: np.ndarray, r: float, axis) -> np.ndarray:
    if r == INF:
        return np.max(arr, axis=axis)
    if r == 1.0:
        return np.sum(arr, axis=axis)
    if r == 2.0:
        return np.sqrt(np.sum(arr * arr, axis=axis))
    return np.sum(arr**r, axis=axis) ** (1.0 / r)


def _weighted_norms(G: np.ndarray, e: MixedExponents, order: str) -> np.ndarray:
    """Norms of |F| omega over the last two axes (x, xi) of G."""
    if e.p == e.q:
        return _lp(G.reshape(G.shape[:-2] + (-1,)), e.p, axis=-1)
    if order == "mixed":
        return _lp(_lp(G, e.p, axis=-2), e.q, axis=-1)
    if order == "amalgam":
        return _lp(_lp(G, e.q, axis=-1), e.p, axis=-1)
    raise ParameterError(f"unknown norm order {order!r}")


def _check(F, omega):
    if F.grid != omega.grid:
        raise GridMismatchError("function and weight live on different grids")


def mixed_norm(F: PhaseFn, omega: Weight, e: MixedExponents) -> float:
    """L^{p,q}_(omega): inner l^p over x, outer l^q over xi."""
    _check(F, omega)
    return float(_weighted_norms(np.abs(F.values) * omega.values, e, "mixed"))


def amalgam_norm(F: PhaseFn, omega: Weight, e: MixedExponents) -> float:
    """W^{p,q}_(omega): inner l^q over xi, outer l^p over x."""
    _check(F, omega)
    return float(_weighted_norms(np.abs(F.values) * omega.values, e, "amalgam"))


def _nondegenerate(phi: Signal):
    if not np.any(phi.values):
        raise DegenerateWindowError("window is identically zero")


def mod_norm(f: Signal, phi: Signal, omega: Weight, e: MixedExponents,
             order: str = "mixed") -> float:
    """``||f||_{M^{p,q}_(omega)}`` computed with window phi."""
    _nondegenerate(phi)
    V = stft(f, phi)
    _check(V, omega)
    return float(_weighted_norms(np.abs(V.values) * omega.values, e, order))


def mod_norms(fs: np.ndarray, phi: Signal, omega: Weight, e: MixedExponents,
              order: str = "mixed") -> np.ndarray:
    """Modulation norms of each row of ``fs`` (shape (S, n))."""
    _nondegenerate(phi)
    if phi.grid != omega.grid or fs.shape[-1] != phi.grid.n:
        raise GridMismatchError("samples, window and weight must share a grid")
    V = _stft_batch(np.atleast_2d(fs), phi.values)
    return _weighted_norms(np.abs(V) * omega.values, e, order)


def window_equivalence(fs, phi1: Signal, phi2: Signal, omega: Weight,
                       e: MixedExponents) -> tuple[float, float]:
    """min and max over fs of ``mod_norm(f, phi1) / mod_norm(f, phi2)``; zero f skipped."""
    fs = list(fs)
    if not fs:
        raise ParameterError("window_equivalence needs at least one sample")
    ratios = []
    for f in fs:
        if not np.any(f.values):
            continue
        ratios.append(mod_norm(f, phi1, omega, e) / mod_norm(f, phi2, omega, e))
    if not ratios:
        raise ParameterError("every sample is zero")
    return float(min(ratios)), float(max(ratios))


def dual_norm_lower_bound(f: Signal, phi: Signal, omega: Weight, e: MixedExponents,
                          gs) -> float:
    """``max_g |<f, g>| / ||g||_{M^{p',q'}_(1/omega)}``, a lower bound for the dual norm."""
    _nondegenerate(phi)
    gs = list(gs)
    if not gs:
        raise ParameterError("dual_norm_lower_bound needs at least one test vector")
    dual_w = omega.reciprocal()
    dual_e = e.conjugate()
    best = 0.0
    for g in gs:
        den = mod_norm(g, phi, dual_w, dual_e)
        if den == 0.0:
            continue
        best = max(best, abs(np.vdot(g.values, f.values)) / den)
    return float(best)


def holder_extremal(f: Signal, phi: Signal, omega: Weight, e: MixedExponents) -> Signal:
    """Test vector g whose STFT is (before projection) Hoelder-dual to ``V_phi f omega``.

    Useful as a near-optimal member of the candidate set of
    ``dual_norm_lower_bound``.
    """
    F = stft(f, phi).values
    G = np.abs(F) * omega.values
    phase = np.exp(1j * np.angle(F))
    p, q = e.p, e.q
    if p == INF:
        inner = np.zeros_like(G)
        inner[np.argmax(G, axis=0), np.arange(G.shape[1])] = 1.0
        col = np.max(G, axis=0)
    else:
        inner = G ** (p - 1.0)
        col = _lp(G, p, axis=0)
    if q == INF:
        outer = np.zeros_like(col)
        outer[np.argmax(col)] = 1.0
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            outer = np.where(col > 0, col ** (q - p), 0.0) if p != INF else col ** (q - 1.0)
    H = phase * omega.values * inner * outer[None, :]
    return reconstruct(PhaseFn(f.grid, H), phi)


def bump(grid: Grid) -> PhaseFn:
    """Nonnegative even bump supported in the torus ball of radius floor(n/8)."""
    r = grid.n // 8
    d = grid.torus_abs(grid.points).astype(float)
    rho2 = d[:, None] ** 2 + d[None, :] ** 2
    vals = np.where(rho2 <= r * r, (1.0 - rho2 / (r + 1.0) ** 2) ** 2, 0.0)
    return PhaseFn(grid, vals)


def _localized_weyl_ops(psi: PhaseFn) -> np.ndarray:
    """Stack of ``Op^w(tau_Y psi)`` over Y, shape (n, n, n, n)."""
    if not np.any(psi.values):
        raise DegenerateWindowError("localizing bump is identically zero")
    n = psi.grid.n
    ops = np.empty((n, n, n, n), complex)
    for y in range(n):
        for eta in range(n):
            shifted = PhaseFn(psi.grid, np.roll(psi.values, (y, eta), axis=(0, 1)))
            ops[y, eta] = quantize(shifted, WEYL).matrix
    return ops


def h_omega_norms(fs: np.ndarray, psi: PhaseFn, omega: Weight) -> np.ndarray:
    """``(sum_Y omega(Y)^2 ||Op^w(tau_Y psi) f||^2)^{1/2}`` for each row of fs."""
    if psi.grid != omega.grid:
        raise GridMismatchError("bump and weight live on different grids")
    ops = _localized_weyl_ops(psi)
    out = np.einsum("yeij,sj->syei", ops, np.atleast_2d(fs))
    energy = np.sum(np.abs(out) ** 2, axis=-1)  # (S, n, n)
    return np.sqrt(np.sum((energy * omega.values**2).reshape(energy.shape[0], -1), axis=1))


def h_omega_norm(f: Signal, psi: PhaseFn, omega: Weight) -> float:
    """Bony-Chemin type norm of f built from Weyl-localized pieces."""
    if f.grid != psi.grid:
        raise GridMismatchError("signal and bump live on different grids")
    return float(h_omega_norms(f.values[None, :], psi, omega)[0])
