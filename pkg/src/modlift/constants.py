"""Frozen constants table and its brute-force derivation.

The table lives in ``constants.ini`` next to this module.  ``derive`` recomputes
every entry from naive nested sums, with no use of the library transforms, and
is what the table was frozen from.
"""

from __future__ import annotations

import configparser
import itertools
from functools import lru_cache
from importlib import resources

import numpy as np

__all__ = ["table", "value", "twisted_kappa", "toeplitz_weyl_kappa", "derive"]


@lru_cache(maxsize=None)
def table() -> dict:
    parser = configparser.ConfigParser()
    parser.read_string(resources.files(__package__).joinpath("constants.ini").read_text())
    return {
        name: (float(sec["coefficient"]), float(sec["n_exponent"]))
        for name, sec in parser.items()
        if name != configparser.DEFAULTSECT
    }


def value(name: str, n: int) -> float:
    coeff, expo = table()[name]
    return coeff * float(n) ** expo


def twisted_kappa(n: int) -> float:
    return value("twisted_convolution", n)


def toeplitz_weyl_kappa(n: int) -> float:
    return value("toeplitz_weyl", n)


# -- naive reference sums used only for derivation ---------------------------

def _e(k, n):
    return np.exp(2j * np.pi * (k % n) / n)


def _stft(f, g, n):
    return np.array([[sum(f[y] * np.conj(g[(y - x) % n]) * _e(-y * xi, n) for y in range(n))
                      for xi in range(n)] for x in range(n)]) / np.sqrt(n)


def _wigner(f, g, n):
    h = (n + 1) // 2
    return np.array([[sum(f[(x + h * y) % n] * np.conj(g[(x - h * y) % n]) * _e(-y * xi, n)
                          for y in range(n)) for xi in range(n)] for x in range(n)]) / np.sqrt(n)


def _weyl_matrix(a, n):
    h = (n + 1) // 2
    return np.array([[sum(a[(h * (x + y)) % n, xi] * _e((x - y) * xi, n) for xi in range(n))
                      for y in range(n)] for x in range(n)]) / n


def _weyl_symbol(K, n):
    # solve the n^2 x n^2 linear system a -> Op^w(a)
    cols = []
    for z, zeta in itertools.product(range(n), repeat=2):
        basis = np.zeros((n, n))
        basis[z, zeta] = 1.0
        cols.append(_weyl_matrix(basis, n).reshape(-1))
    M = np.array(cols).T
    return np.linalg.solve(M, K.reshape(-1)).reshape(n, n)


def _f_sigma(a, n):
    return np.array([[sum(a[z, zeta] * _e(2 * (eta * z - y * zeta), n)
                          for z in range(n) for zeta in range(n))
                      for eta in range(n)] for y in range(n)]) / n


def _twisted_raw(a, b, n):
    return np.array([[sum(a[(x - y) % n, (xi - eta) % n] * b[y, eta] * _e(2 * (y * xi - x * eta), n)
                          for y in range(n) for eta in range(n))
                      for xi in range(n)] for x in range(n)])


def _fit(target, model):
    """Least-squares scalar c with target ~ c * model, and the residual."""
    c = np.vdot(model, target) / np.vdot(model, model)
    return c, float(np.max(np.abs(target - c * model)))


def derive(n: int = 3, seed: int = 0) -> dict:
    """Brute-force fit of every table entry at modulus n.

    Returns ``{name: (fitted_value, residual)}``; the residual is the max
    abs misfit and is ~1e-15 when the constant is exact.
    """
    rng = np.random.default_rng(seed)

    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    out = {}
    f, phi = cplx(n), cplx(n)
    V = _stft(f, phi, n)
    synth = np.array([sum(V[x, xi] * _e(y * xi, n) * phi[(y - x) % n]
                          for x in range(n) for xi in range(n)) for y in range(n)])
    c, r = _fit(synth, np.linalg.norm(phi) ** 2 * f)
    out["stft_reconstruction"] = (c.real, r)

    a, psi = cplx(n, n), cplx(n, n)
    energy = 0.0
    for X in itertools.product(range(n), repeat=2):
        prod = a * np.conj(np.roll(psi, X, axis=(0, 1)))
        energy += np.sum(np.abs(_f_sigma(prod, n)) ** 2)
    c = energy / (np.linalg.norm(a) ** 2 * np.linalg.norm(psi) ** 2)
    out["symplectic_stft_energy"] = (float(c), 0.0)

    b = cplx(n, n)
    ab = _weyl_symbol(_weyl_matrix(a, n) @ _weyl_matrix(b, n), n)
    c, r = _fit(_f_sigma(ab, n), _twisted_raw(_f_sigma(a, n), _f_sigma(b, n), n))
    out["twisted_convolution"] = (c.real, r)

    sym = rng.standard_normal((n, n))
    T = sum(sym[x, xi] * np.outer(v, np.conj(v)) / n
            for x in range(n) for xi in range(n)
            for v in [np.array([_e(y * xi, n) * phi[(y - x) % n] for y in range(n)])])
    W = _wigner(phi, phi, n)
    conv = np.array([[sum(sym[(x - z) % n, (xi - zeta) % n] * W[z, zeta]
                          for z in range(n) for zeta in range(n))
                      for xi in range(n)] for x in range(n)])
    c, r = _fit(T, _weyl_matrix(conv, n))
    out["toeplitz_weyl"] = (c.real, r)

    theta = np.zeros((n, n))
    theta[0, 0], theta[1, 0], theta[-1, 0], theta[0, 1], theta[0, -1] = 1.0, 0.5, 0.5, 0.25, 0.25
    kappa = out["twisted_convolution"][0]
    tw = kappa * _twisted_raw(kappa * _twisted_raw(theta, theta, n), theta, n)
    Mt = _weyl_matrix(theta, n)
    hash3 = _weyl_symbol(Mt @ Mt @ Mt, n)
    c, r = _fit(tw, hash3)
    out["triple_identity"] = (c.real, r)

    h = (n + 1) // 2
    fcheck = f[(-np.arange(n)) % n]
    Wc = _wigner(fcheck, phi, n)
    i = np.arange(n)
    moved = Wc[(-h * i) % n][:, (-h * i) % n] * np.exp(-2j * np.pi * ((h * np.outer(i, i)) % n) / n)
    c, r = _fit(V, moved)
    out["stft_wigner"] = (c.real, r)
    return out
