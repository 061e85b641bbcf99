"""JIT-compiled Monte Carlo kernels (default backend).

Same interface and formulas as the numpy backend; scalar loops that numba
turns into tight machine code. All kernels release the GIL so thread-based
workers scale.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

UNIFORM_FLOOR = 2.0**-64
_TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def count_ni_outages(u, K, N, P, r):
    T = u.shape[0]
    target = N * K * r * math.log(P)
    count = 0
    for t in range(T):
        acc = 0.0
        for k in range(K):
            energy_h = -math.log(max(u[t, k], UNIFORM_FLOOR))
            energy_g = -math.log(max(u[t, 2 * K + k], UNIFORM_FLOOR))
            a2 = P / (energy_h * P + 1.0)
            ga2 = energy_g * a2
            rate = math.log1p(P * ga2 * energy_h / (1.0 + ga2))
            weight = float(N) if k < K - 1 else float(N - 1)
            acc += weight * rate
        if acc <= target:
            count += 1
    return count


@njit(cache=True, nogil=True)
def count_subchannel_outages(u, P, r):
    T = u.shape[0]
    target = r * math.log(P)
    count = 0
    for t in range(T):
        energy_h = -math.log(max(u[t, 0], UNIFORM_FLOOR))
        energy_g = -math.log(max(u[t, 2], UNIFORM_FLOOR))
        a2 = P / (energy_h * P + 1.0)
        ga2 = energy_g * a2
        if math.log1p(P * ga2 * energy_h / (1.0 + ga2)) <= target:
            count += 1
    return count


@njit(cache=True, nogil=True)
def _cholesky_lower_inplace(A, n):
    """In-place lower Cholesky of a Hermitian matrix given by its lower
    triangle; returns the log-determinant contribution sum(log(diag))."""
    logdiag = 0.0
    for c in range(n):
        s = A[c, c].real
        for k in range(c):
            e = A[c, k]
            s -= e.real * e.real + e.imag * e.imag
        d = math.sqrt(s)
        logdiag += math.log(d)
        A[c, c] = d
        inv = 1.0 / d
        for a in range(c + 1, n):
            acc = A[a, c]
            for k in range(c):
                acc -= A[a, k] * np.conj(A[c, k])
            A[a, c] = acc * inv
    return logdiag


@njit(cache=True, nogil=True)
def count_general_outages(u, K, N, P, r, imask):
    # The mixing matrix is lower triangular, so only lower triangles are
    # formed and the Cholesky/solve steps are hand-rolled: per-trial LAPACK
    # dispatch would dominate at these matrix sizes.
    T = u.shape[0]
    NK = N * K
    target = (NK + 1) * r * math.log(P)
    count = 0
    h = np.empty(K, np.complex128)
    g = np.empty(K, np.complex128)
    iv = np.empty(K, np.complex128)
    alpha = np.empty(K, np.float64)
    F = np.zeros((NK, NK), np.complex128)
    mix = np.zeros((NK, NK), np.complex128)
    eq = np.zeros((NK, NK), np.complex128)
    cov = np.empty((NK, NK), np.complex128)
    white = np.zeros((NK, NK), np.complex128)
    gram = np.empty((NK, NK), np.complex128)
    for t in range(T):
        for k in range(K):
            energy_h = -math.log(max(u[t, k], UNIFORM_FLOOR))
            ph = _TWO_PI * u[t, K + k]
            h[k] = math.sqrt(energy_h) * complex(math.cos(ph), math.sin(ph))
            energy_g = -math.log(max(u[t, 2 * K + k], UNIFORM_FLOOR))
            pg = _TWO_PI * u[t, 3 * K + k]
            g[k] = math.sqrt(energy_g) * complex(math.cos(pg), math.sin(pg))
            energy_i = -math.log(max(u[t, 4 * K + k], UNIFORM_FLOOR))
            pi = _TWO_PI * u[t, 5 * K + k]
            iv[k] = imask[k] * math.sqrt(energy_i) * complex(math.cos(pi), math.sin(pi))
            ii = iv[k].real * iv[k].real + iv[k].imag * iv[k].imag
            alpha[k] = math.sqrt(min(1.0, P / (P * (energy_h + ii) + 1.0)))
        for j in range(NK):
            kj = j % K
            fac = iv[kj] * alpha[kj]
            for j1 in range(j):
                F[j, j1] = fac * F[j - 1, j1]
            F[j, j] = 1.0
        for j in range(NK):
            gk = g[j % K]
            for j1 in range(j + 1):
                m = gk * F[j, j1] * alpha[j1 % K]
                mix[j, j1] = m
                eq[j, j1] = m * h[j1 % K]
        # cov = I + mix mix^H (lower triangle only)
        for a in range(NK):
            for b in range(a + 1):
                acc = complex(0.0, 0.0)
                for c in range(b + 1):
                    acc += mix[a, c] * np.conj(mix[b, c])
                cov[a, b] = acc
            cov[a, a] += 1.0
        _cholesky_lower_inplace(cov, NK)
        # forward solve L white = eq; both sides lower triangular
        for col in range(NK):
            for a in range(col, NK):
                acc = eq[a, col]
                for k in range(col, a):
                    acc -= cov[a, k] * white[k, col]
                white[a, col] = acc / cov[a, a].real
        # gram = I + P white white^H (lower triangle only)
        for a in range(NK):
            for b in range(a + 1):
                acc = complex(0.0, 0.0)
                for c in range(b + 1):
                    acc += white[a, c] * np.conj(white[b, c])
                gram[a, b] = P * acc
            gram[a, a] += 1.0
        logdet = _cholesky_lower_inplace(gram, NK)
        if 2.0 * logdet <= target:
            count += 1
    return count
