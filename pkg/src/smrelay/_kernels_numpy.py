"""Pure-numpy Monte Carlo kernels (fallback backend).

Each function counts outage events for a block of trials handed over as
per-trial uniform rows (layout: h magnitudes, h phases, g magnitudes,
g phases, i magnitudes, i phases, each K wide). Kept in lockstep with the
numba backend: same layout, same formulas, same thresholds.
"""

from __future__ import annotations

import numpy as np

UNIFORM_FLOOR = 2.0**-64

# Batched (T, NK, NK) workspaces get large; slabbing keeps memory flat.
_GENERAL_SLAB = 4096


def _mag_sq(u: np.ndarray) -> np.ndarray:
    return -np.log(np.maximum(u, UNIFORM_FLOOR))


def count_ni_outages(u: np.ndarray, K: int, N: int, P: float, r: float) -> int:
    """Outages of the weighted-sum event N*(R_1+..+R_{K-1}) + (N-1)*R_K <= NKr log P."""
    energy_h = _mag_sq(u[:, 0:K])
    energy_g = _mag_sq(u[:, 2 * K : 3 * K])
    a2 = P / (energy_h * P + 1.0)
    ga2 = energy_g * a2
    rates = np.log1p(P * ga2 * energy_h / (1.0 + ga2))
    weights = np.full(K, float(N))
    weights[K - 1] = float(N - 1)
    target = N * K * r * np.log(P)
    return int(np.count_nonzero(rates @ weights <= target))


def count_subchannel_outages(u: np.ndarray, P: float, r: float) -> int:
    """Outages of a single relay sub-channel against the rate target r log P."""
    energy_h = _mag_sq(u[:, 0])
    energy_g = _mag_sq(u[:, 2])
    a2 = P / (energy_h * P + 1.0)
    ga2 = energy_g * a2
    rates = np.log1p(P * ga2 * energy_h / (1.0 + ga2))
    return int(np.count_nonzero(rates <= r * np.log(P)))


def count_general_outages(
    u: np.ndarray, K: int, N: int, P: float, r: float, imask: np.ndarray
) -> int:
    """Outages of the log-det event with interference and clipped amplification."""
    total = 0
    for lo in range(0, u.shape[0], _GENERAL_SLAB):
        total += _general_slab(u[lo : lo + _GENERAL_SLAB], K, N, P, r, imask)
    return total


def _general_slab(
    u: np.ndarray, K: int, N: int, P: float, r: float, imask: np.ndarray
) -> int:
    T = u.shape[0]
    if T == 0:
        return 0
    NK = N * K
    energy_h = _mag_sq(u[:, 0:K])
    h = np.sqrt(energy_h) * np.exp(2j * np.pi * u[:, K : 2 * K])
    g = np.sqrt(_mag_sq(u[:, 2 * K : 3 * K])) * np.exp(2j * np.pi * u[:, 3 * K : 4 * K])
    i = (
        np.sqrt(_mag_sq(u[:, 4 * K : 5 * K]))
        * np.exp(2j * np.pi * u[:, 5 * K : 6 * K])
        * imask
    )
    energy_i = i.real * i.real + i.imag * i.imag
    alpha = np.sqrt(np.minimum(1.0, P / (P * (energy_h + energy_i) + 1.0)))

    # Propagation chains: row j extends row j-1 by the listening relay's
    # amplified leak-through.
    ialpha = i * alpha
    F = np.zeros((T, NK, NK), dtype=np.complex128)
    F[:, 0, 0] = 1.0
    for j in range(1, NK):
        F[:, j, :j] = ialpha[:, j % K, None] * F[:, j - 1, :j]
        F[:, j, j] = 1.0

    kmap = np.arange(NK) % K
    mix = g[:, kmap][:, :, None] * F * alpha[:, kmap][:, None, :]
    eye = np.eye(NK, dtype=np.complex128)
    cov = eye + mix @ mix.conj().swapaxes(1, 2)
    L = np.linalg.cholesky(cov)
    white = np.linalg.solve(L, mix * h[:, kmap][:, None, :])
    gram = eye + P * (white @ white.conj().swapaxes(1, 2))
    L2 = np.linalg.cholesky(gram)
    logdet = 2.0 * np.sum(np.log(np.diagonal(L2, axis1=1, axis2=2).real), axis=1)
    target = (NK + 1) * r * np.log(P)
    return int(np.count_nonzero(logdet <= target))
