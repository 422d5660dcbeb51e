"""Numerical signatures of the lifting isomorphisms.

A Toeplitz or Weyl operator T with a weight symbol is an isomorphism between
weighted modulation spaces when the ratio
``||T f||_{M^{p,q}_(target)} / ||f||_{M^{p,q}_(source)}`` is bounded above and
below.  On a finite grid every ratio is finite; what carries information is
how the spread of ratios (``cond``) behaves as n grows.

Thresholds used by the acceptance suite (cond <= 20, drift factor 2,
envelope drift 4) are calibration constants chosen for this artifact.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateWindowError, ParameterError, SingularOperatorError
from .modspace import MixedExponents, mod_norms
from .phase_space import Grid, PhaseFn, Signal, stft, tf_atoms, wigner
from .quantize import WEYL, LinOp, quantize, toeplitz
from .weights import Weight, convolve, gaussian_phase_weight, parse_weight_spec, periodized_gaussian

__all__ = [
    "LiftReport",
    "SpectralReport",
    "draw_samples",
    "lift_ratio_report",
    "quadratic_identity_check",
    "m2_isomorphism_check",
    "invert_toeplitz",
    "frame_bound_ratio",
    "spectral_invariance_report",
    "gaussian_window",
    "parse_window_spec",
    "gaussian_lift_factorize",
    "semigroup_error",
    "wigner_bridge_error",
    "toeplitz_factorization_error",
    "smooth_weight_isomorphism_suite",
]

SINGULAR_COND = 1e12


@dataclass
class LiftReport:
    operator_desc: str
    source_weight_spec: str
    target_weight_spec: str
    p: float
    q: float
    norm_order: str
    n: int
    num_samples: int
    seed: int
    ratio_min: float
    ratio_max: float
    cond: float
    failures: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SpectralReport:
    envelope_forward: np.ndarray = field(repr=False)
    envelope_inverse: np.ndarray = field(repr=False)
    weighted_sum_forward: float
    weighted_sum_inverse: float
    condition_number: float

    @property
    def ratio(self) -> float:
        return self.weighted_sum_inverse / self.weighted_sum_forward

    def to_dict(self) -> dict:
        return {
            "envelope_forward": [float(v) for v in self.envelope_forward.reshape(-1)],
            "envelope_inverse": [float(v) for v in self.envelope_inverse.reshape(-1)],
            "weighted_sum_forward": self.weighted_sum_forward,
            "weighted_sum_inverse": self.weighted_sum_inverse,
            "condition_number": self.condition_number,
            "ratio": self.ratio,
        }


def draw_samples(grid: Grid, num_samples: int, seed: int) -> np.ndarray:
    """i.i.d. standard complex Gaussian test vectors, shape (num_samples, n)."""
    if num_samples < 1:
        raise ParameterError("num_samples must be >= 1")
    rng = np.random.default_rng(seed)
    shape = (num_samples, grid.n)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def lift_ratio_report(T: LinOp, phi: Signal, omega_src: Weight, omega_tgt: Weight,
                      e: MixedExponents, num_samples: int = 100, seed: int = 0, *,
                      operator_desc: str = "", source_spec: str = "", target_spec: str = "",
                      norm_order: str = "mixed") -> LiftReport:
    """Spread of ``||T f||_(target) / ||f||_(source)`` over seeded random f."""
    if not np.any(phi.values):
        raise DegenerateWindowError("window is identically zero")
    fs = draw_samples(T.grid, num_samples, seed)
    num = mod_norms(fs @ T.matrix.T, phi, omega_tgt, e, norm_order)
    den = mod_norms(fs, phi, omega_src, e, norm_order)
    ok = (den > 0) & (num > 0)
    ratios = num[ok] / den[ok]
    if ratios.size:
        rmin, rmax = float(ratios.min()), float(ratios.max())
        cond = rmax / rmin
    else:
        rmin = rmax = cond = math.nan
    return LiftReport(operator_desc, source_spec, target_spec, e.p, e.q, norm_order,
                      T.grid.n, num_samples, seed, rmin, rmax, cond, int((~ok).sum()))


def quadratic_identity_check(omega: Weight, phi: Signal, f: Signal):
    """``(<Tp_phi(omega) f, f>, sum omega |V_phi f|^2, |difference|)``."""
    T = toeplitz(phi, PhaseFn(omega.grid, omega.values))
    lhs = complex(np.vdot(f.values, T.matrix @ f.values))
    rhs = float(np.sum(omega.values * np.abs(stft(f, phi).values) ** 2))
    return lhs, rhs, abs(lhs - rhs)


def m2_isomorphism_check(omega: Weight, phi: Signal, num_samples: int = 100, seed: int = 0,
                         spec: str = "omega") -> LiftReport:
    """``Tp_phi(omega)`` from M^2_(theta) to M^2_(1/theta), theta = omega^{1/2}."""
    T = toeplitz(phi, PhaseFn(omega.grid, omega.values))
    theta = omega.sqrt()
    return lift_ratio_report(T, phi, theta, theta.reciprocal(), MixedExponents(2, 2),
                             num_samples, seed, operator_desc=f"toeplitz({spec})",
                             source_spec=f"pow:0.5|{spec}", target_spec=f"pow:-0.5|{spec}")


def _inverse(T: LinOp, what: str = "operator"):
    s = np.linalg.svd(T.matrix, compute_uv=False)
    smin = float(s[-1])
    cond2 = math.inf if smin == 0.0 else float(s[0] / smin)
    if cond2 > SINGULAR_COND:
        raise SingularOperatorError(
            f"{what} is numerically singular: cond = {cond2:.3g}, "
            f"smallest singular value = {smin:.3g}", smallest_singular_value=smin)
    inv = np.linalg.solve(T.matrix, np.eye(T.grid.n))
    return LinOp(T.grid, inv), cond2


def invert_toeplitz(omega: Weight, phi: Signal):
    """Direct inverse of ``Tp_phi(omega)`` and its spectral condition number."""
    T = toeplitz(phi, PhaseFn(omega.grid, omega.values))
    return _inverse(T, "Toeplitz operator")


def frame_bound_ratio(phi: Signal) -> float:
    """``max_t sum_x |phi(t - x)|^2 / min_t sum_x |phi(t - x)|^2``."""
    n = phi.grid.n
    a = np.abs(phi.values) ** 2
    sums = np.array([np.sum(a[(t - np.arange(n)) % n]) for t in range(n)])
    if sums.min() == 0.0:
        raise DegenerateWindowError("window is identically zero")
    return float(sums.max() / sums.min())


def _gabor_envelope(T: np.ndarray, G: np.ndarray, nrm2: float) -> np.ndarray:
    """``h(Y) = max_X |<T phi_X, phi_{X+Y}>| / ||phi||^2`` as an (n, n) array."""
    n = T.shape[0]
    M = np.abs(np.conj(G) @ T @ G.T) / nrm2  # M[X', X] = |<T phi_X, phi_X'>|
    M = M.reshape(n, n, n, n)  # [x', xi', x, xi]
    i = np.arange(n)
    env = np.zeros((n, n))
    for y in range(n):
        for eta in range(n):
            diag = M[(i[:, None] + y) % n, (i[None, :] + eta) % n, i[:, None], i[None, :]]
            env[y, eta] = diag.max()
    return env


def spectral_invariance_report(T: LinOp, phi: Signal, v: Weight) -> SpectralReport:
    """Gabor-matrix off-diagonal envelopes of T and of its inverse."""
    if not np.any(phi.values):
        raise DegenerateWindowError("window is identically zero")
    Tinv, cond2 = _inverse(T, "operator")
    n = T.grid.n
    G = tf_atoms(phi.values).reshape(n * n, n)
    nrm2 = phi.norm() ** 2
    fwd = _gabor_envelope(T.matrix, G, nrm2)
    inv = _gabor_envelope(Tinv.matrix, G, nrm2)
    return SpectralReport(fwd, inv, float(np.sum(fwd * v.values)),
                          float(np.sum(inv * v.values)), cond2)


def gaussian_window(grid: Grid, mu: float) -> Signal:
    """Periodized sampled ``e^{-mu x^2 / 2}`` in symplectic units; mu = 1 is DFT-invariant."""
    return Signal(grid, periodized_gaussian(grid, mu / 2.0))


def parse_window_spec(text: str, grid: Grid) -> Signal:
    """Window from ``"gauss:sigma"`` (mu = 1/sigma^2), ``"delta"`` or ``"file:<path>"``.

    A window file holds one sample per line, either ``re`` or ``re,im``.
    """
    from .errors import SpecParseError

    text = text.strip()
    if text == "delta":
        v = np.zeros(grid.n, complex)
        v[0] = 1.0
        return Signal(grid, v)
    if text.startswith("gauss:"):
        try:
            sigma = float(text[len("gauss:"):])
        except ValueError:
            raise SpecParseError(f"bad window spec {text!r}") from None
        if not sigma > 0:
            raise SpecParseError(f"window width must be positive in {text!r}")
        return gaussian_window(grid, 1.0 / sigma**2)
    if text.startswith("file:"):
        path = text[len("file:"):]
        vals = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = [float(s) for s in line.split(",")]
                vals.append(complex(parts[0], parts[1] if len(parts) > 1 else 0.0))
        if len(vals) != grid.n:
            raise SpecParseError(f"window file {path} has {len(vals)} samples, need {grid.n}")
        return Signal(grid, np.array(vals))
    raise SpecParseError(f"unknown window spec {text!r}")


def gaussian_lift_factorize(lam1: float, lam2: float, grid: Grid | None = None):
    """Split ``Phi_lambda = Phi_mu (*) Phi_nu`` with ``mu1 mu2 = 1``.

    Returns ``(mu, nu, phi)``; phi is the mu1-Gaussian window on ``grid`` (None
    when no grid is given).
    """
    if not (lam1 > 0 and lam2 > 0):
        raise ParameterError("Gaussian parameters must be positive")
    if not lam1 * lam2 < 1.0:
        raise ParameterError(f"factorization needs lam1 * lam2 < 1, got {lam1 * lam2}")
    r = math.sqrt(lam1 * lam2)
    mu = (lam1 / r, lam2 / r)
    nu = (1.0 / (1.0 / lam1 - 1.0 / mu[0]), 1.0 / (1.0 / lam2 - 1.0 / mu[1]))
    phi = gaussian_window(grid, mu[0]) if grid is not None else None
    return mu, nu, phi


def _rel_fit(target: np.ndarray, model: np.ndarray):
    c = np.vdot(model, target) / np.vdot(model, model)
    err = float(np.max(np.abs(target - c * model)) / np.max(np.abs(target)))
    return complex(c), err


def semigroup_error(grid: Grid, mu, nu):
    """Fit ``Phi_mu (*) Phi_nu = c Phi_lambda`` with ``1/lambda = 1/mu + 1/nu``.

    Returns ``(c, relative max error)``.
    """
    lam = tuple(m * v / (m + v) for m, v in zip(mu, nu))
    conv = convolve(gaussian_phase_weight(grid, *mu), gaussian_phase_weight(grid, *nu))
    c, err = _rel_fit(conv.values, gaussian_phase_weight(grid, *lam).values)
    return c.real, err


def wigner_bridge_error(grid: Grid, mu1: float):
    """Fit ``Phi_(mu1, 1/mu1) = c W(phi, phi)`` for the mu1-Gaussian window."""
    phi = gaussian_window(grid, mu1)
    W = wigner(phi, phi).values
    c, err = _rel_fit(gaussian_phase_weight(grid, mu1, 1.0 / mu1).values, W)
    return c, err


def toeplitz_factorization_error(omega0: Weight, lam1: float, lam2: float):
    """Fit ``Op^w(omega0 (*) Phi_lambda) = c Tp_phi(omega0 (*) Phi_nu)``."""
    grid = omega0.grid
    mu, nu, phi = gaussian_lift_factorize(lam1, lam2, grid)
    lhs = quantize(PhaseFn(grid, convolve(omega0, gaussian_phase_weight(grid, lam1, lam2)).values),
                   WEYL).matrix
    rhs = toeplitz(phi, PhaseFn(grid, convolve(omega0, gaussian_phase_weight(grid, *nu)).values))
    return _rel_fit(lhs, rhs.matrix)


def smooth_weight_isomorphism_suite(omega0_spec: str, window_spec: str, e: MixedExponents,
                                    n_list, num_samples: int = 100, seed: int = 0, *,
                                    smoothing: str = "gauss:1,1",
                                    weight_specs=("poly:-1", "poly:0", "poly:1"),
                                    orders=("mixed", "amalgam"),
                                    operator: str = "weyl") -> list[LiftReport]:
    """Lift reports for an operator with symbol a = omega0 (*) Phi, and its inverse.

    ``operator="weyl"`` uses ``Op^w(a)``; ``operator="toeplitz"`` uses
    ``Tp_phi(a)``.  For each n, weight omega and norm order: the forward
    report maps M_(omega) to M_(omega/a), the inverse report maps back, and
    the composite ``T^{-1} T`` is measured source-to-source.
    """
    if operator not in ("weyl", "toeplitz"):
        raise ParameterError(f"unknown operator kind {operator!r}")
    reports = []
    for n in n_list:
        grid = Grid(n)
        a_spec = f"conv:{omega0_spec}|{smoothing}"
        a = parse_weight_spec(a_spec, grid)
        phi = parse_window_spec(window_spec, grid)
        if operator == "weyl":
            T = quantize(PhaseFn(grid, a.values), WEYL)
        else:
            T = toeplitz(phi, PhaseFn(grid, a.values))
        Tinv, _ = _inverse(T, f"{operator} operator")
        composite = Tinv @ T
        for w_spec in weight_specs:
            w = parse_weight_spec(w_spec, grid)
            tgt_spec = f"prod:{w_spec}|recip:{a_spec}"
            tgt = w / a
            for order in orders:
                common = dict(norm_order=order)
                reports.append(lift_ratio_report(
                    T, phi, w, tgt, e, num_samples, seed, operator_desc=f"{operator}({a_spec})",
                    source_spec=w_spec, target_spec=tgt_spec, **common))
                reports.append(lift_ratio_report(
                    Tinv, phi, tgt, w, e, num_samples, seed,
                    operator_desc=f"inverse({operator}({a_spec}))",
                    source_spec=tgt_spec, target_spec=w_spec, **common))
                reports.append(lift_ratio_report(
                    composite, phi, w, w, e, num_samples, seed,
                    operator_desc=f"composite({operator}({a_spec}))",
                    source_spec=w_spec, target_spec=w_spec, **common))
    return reports
