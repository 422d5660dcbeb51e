"""Brute-force reference implementations used to derive frozen test values.

Everything here is written as literal nested sums over Z_n with Python
loops and ``cmath``; nothing is shared with the library code.
"""

from __future__ import annotations

import cmath
import math

import numpy as np


def e(k, n):
    return cmath.exp(2j * math.pi * k / n)


def inv2(n):
    return pow(2, -1, n)


def dft(f):
    n = len(f)
    return [sum(f[y] * e(-y * xi, n) for y in range(n)) / math.sqrt(n) for xi in range(n)]


def stft(f, phi):
    n = len(f)
    out = np.zeros((n, n), complex)
    for x in range(n):
        for xi in range(n):
            s = 0j
            for y in range(n):
                s += f[y] * np.conj(phi[(y - x) % n]) * e(-y * xi, n)
            out[x, xi] = s / math.sqrt(n)
    return out


def atom(phi, x, xi):
    n = len(phi)
    return np.array([e(y * xi, n) * phi[(y - x) % n] for y in range(n)])


def synthesis_sum(V, phi):
    """Unnormalized sum_X V(X) phi_X."""
    n = len(phi)
    out = np.zeros(n, complex)
    for x in range(n):
        for xi in range(n):
            out += V[x, xi] * atom(phi, x, xi)
    return out


def wigner(f, g):
    n = len(f)
    h = inv2(n)
    out = np.zeros((n, n), complex)
    for x in range(n):
        for xi in range(n):
            s = 0j
            for y in range(n):
                s += f[(x + h * y) % n] * np.conj(g[(x - h * y) % n]) * e(-y * xi, n)
            out[x, xi] = s / math.sqrt(n)
    return out


def symplectic_fourier(a):
    """n^{-1} sum a(z, zeta) e^{2 pi i 2 (eta z - y zeta) / n}."""
    n = a.shape[0]
    out = np.zeros((n, n), complex)
    for y in range(n):
        for eta in range(n):
            s = 0j
            for z in range(n):
                for zeta in range(n):
                    s += a[z, zeta] * e(2 * (eta * z - y * zeta), n)
            out[y, eta] = s / n
    return out


def quantize(a, t):
    n = a.shape[0]
    h = inv2(n)
    T = np.zeros((n, n), complex)
    for x in range(n):
        for y in range(n):
            m = {0: x, 1: y, 0.5: (h * (x + y)) % n}[t]
            T[x, y] = sum(a[m, xi] * e((x - y) * xi, n) for xi in range(n)) / n
    return T


def symbol_by_solve(T, t):
    """Solve the n^2 x n^2 linear system Op_t(a) = T for a."""
    n = T.shape[0]
    cols = []
    for k in range(n * n):
        basis = np.zeros(n * n, complex)
        basis[k] = 1.0
        cols.append(quantize(basis.reshape(n, n), t).reshape(-1))
    M = np.array(cols).T
    return np.linalg.solve(M, T.reshape(-1)).reshape(n, n)


def matmul(A, B):
    n = A.shape[0]
    C = np.zeros((n, n), complex)
    for i in range(n):
        for j in range(n):
            C[i, j] = sum(A[i, k] * B[k, j] for k in range(n))
    return C


def twisted(a, b):
    """n^{-1} sum a(x-y, xi-eta) b(y, eta) e^{2 pi i 2 (y xi - x eta) / n}."""
    n = a.shape[0]
    out = np.zeros((n, n), complex)
    for x in range(n):
        for xi in range(n):
            s = 0j
            for y in range(n):
                for eta in range(n):
                    s += a[(x - y) % n, (xi - eta) % n] * b[y, eta] * e(2 * (y * xi - x * eta), n)
            out[x, xi] = s / n
    return out


def toeplitz(phi, a):
    n = len(phi)
    T = np.zeros((n, n), complex)
    for x in range(n):
        for xi in range(n):
            g = atom(phi, x, xi)
            T += a[x, xi] * np.outer(g, np.conj(g))
    return T / n


def torus(k, n):
    k %= n
    return min(k, n - k)


def bracket(x, xi, n):
    return math.sqrt(1 + torus(x, n) ** 2 + torus(xi, n) ** 2)


def poly_weight(n, s):
    return np.array([[bracket(x, xi, n) ** s for xi in range(n)] for x in range(n)])


def periodized_gaussian_1d(n, lam, images=8):
    """sum_{|k| <= images} exp(-lam (2 pi / n) (x + k n)^2) at the centred representative."""
    out = []
    for x in range(n):
        xc = x if x <= n // 2 else x - n
        out.append(sum(math.exp(-lam * (2 * math.pi / n) * (xc + k * n) ** 2)
                       for k in range(-images, images + 1)))
    return np.array(out)


def gaussian_weight(n, lam1, lam2, images=8):
    g = np.outer(periodized_gaussian_1d(n, lam1, images), periodized_gaussian_1d(n, lam2, images))
    return g * (n * n / g.sum())


def cyclic_convolve(w, phi):
    n = w.shape[0]
    out = np.zeros((n, n))
    for x in range(n):
        for xi in range(n):
            s = 0.0
            for z in range(n):
                for zeta in range(n):
                    s += w[(x - z) % n, (xi - zeta) % n] * phi[z, zeta]
            out[x, xi] = s / (n * n)
    return out


def moderate_constant(w, v):
    n = w.shape[0]
    best = 0.0
    for x in range(n):
        for xi in range(n):
            for y in range(n):
                for eta in range(n):
                    r = w[(x + y) % n, (xi + eta) % n] / (w[x, xi] * v[y, eta])
                    best = max(best, r)
    return best


def lp(vals, r):
    if r == math.inf:
        return max(vals)
    return sum(v**r for v in vals) ** (1.0 / r)


def mixed_norm(F, w, p, q):
    n = F.shape[0]
    cols = [lp([abs(F[x, xi]) * w[x, xi] for x in range(n)], p) for xi in range(n)]
    return lp(cols, q)


def amalgam_norm(F, w, p, q):
    n = F.shape[0]
    rows = [lp([abs(F[x, xi]) * w[x, xi] for xi in range(n)], q) for x in range(n)]
    return lp(rows, p)


def forward_difference_seminorm(a, w, K):
    n = a.shape[0]
    best = 0.0
    for ax in range(K + 1):
        for axi in range(K + 1 - ax):
            d = a.copy()
            for _ in range(ax):
                d = np.array([[d[(x + 1) % n, xi] - d[x, xi] for xi in range(n)] for x in range(n)])
            for _ in range(axi):
                d = np.array([[d[x, (xi + 1) % n] - d[x, xi] for xi in range(n)] for x in range(n)])
            for x in range(n):
                for xi in range(n):
                    best = max(best, abs(d[x, xi]) / w[x, xi])
    return best
