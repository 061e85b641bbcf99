"""Amplification gains, the equivalent block channel, and a slot-level simulator.

The relay chain is linear, so a whole block collapses to

    y = H_T x + M n + z,   H_T = G F Omega H,   M = G F Omega,

with diagonal uplink (H), downlink (G), and amplification (Omega) matrices
and a unit-lower-triangular propagation matrix F that tracks how each
amplified slot leaks into later slots through inter-relay interference.
The simulator in this module replays the slots literally and serves as the
ground-truth oracle for the matrix construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .topology import REGIME_INTERFERENCE, REGIME_NO_INTERFERENCE


def amp_gain_no_interference(h_k: complex, P: float) -> float:
    """Amplitude gain a with a^2 = P / (|h|^2 P + 1): relay output power is exactly P."""
    if P <= 0.0:
        raise ValueError(f"SNR must be positive, got {P}")
    return float(np.sqrt(P / (abs(h_k) ** 2 * P + 1.0)))


def amp_gain_interference(h_k: complex, i_k: complex, P: float) -> float:
    """Clipped amplitude gain a^2 = min(1, P / (P(|h|^2 + |i|^2) + 1)).

    The clip keeps a * |i| <= 1, which bounds every propagation-chain factor.
    """
    if P <= 0.0:
        raise ValueError(f"SNR must be positive, got {P}")
    s = abs(h_k) ** 2 + abs(i_k) ** 2
    return float(np.sqrt(min(1.0, P / (P * s + 1.0))))


@dataclass(frozen=True)
class AmplificationGains:
    """Per-relay amplitude gains (index k-1 is relay k) and the regime they assume."""

    alpha: np.ndarray
    regime: str


def amplification_gains(re: ChannelRealization, P: float, regime: str) -> AmplificationGains:
    if P <= 0.0:
        raise ValueError(f"SNR must be positive, got {P}")
    if regime == REGIME_NO_INTERFERENCE:
        alpha = np.sqrt(P / (np.abs(re.h) ** 2 * P + 1.0))
    elif regime == REGIME_INTERFERENCE:
        s = np.abs(re.h) ** 2 + np.abs(re.i) ** 2
        alpha = np.sqrt(np.minimum(1.0, P / (P * s + 1.0)))
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return AmplificationGains(alpha=alpha, regime=regime)


def propagation_coeffs(
    re: ChannelRealization, gains: AmplificationGains, K: int, N: int
) -> np.ndarray:
    """Unit-lower-triangular NK x NK map from amplified slot injections to relay outputs.

    Row j extends row j-1's chains by the listening relay's amplified
    leak-through i_k(j) * alpha_k(j), so entry (j, j1) is the product of
    those factors along slots j1+1..j. Under the clipped gains each factor
    has magnitude <= 1, hence every entry does too.
    """
    _check_dims(re, K, N)
    NK = N * K
    factors = re.i * gains.alpha
    F = np.zeros((NK, NK), dtype=np.complex128)
    F[0, 0] = 1.0
    for j in range(1, NK):
        F[j, :j] = factors[j % K] * F[j - 1, :j]
        F[j, j] = 1.0
    return F


@dataclass(frozen=True)
class EquivalentChannel:
    """Matrix form of one block: y = H_T x + noise_mix n + z.

    h_diag/g_diag/alpha_diag are the diagonals of H, G, Omega (slot j's
    entries belong to the relay listening in slot j+1, 0-based); P_N is the
    received-noise covariance I + noise_mix noise_mix^H.
    """

    K: int
    N: int
    F: np.ndarray
    noise_mix: np.ndarray
    H_T: np.ndarray
    P_N: np.ndarray
    h_diag: np.ndarray
    g_diag: np.ndarray
    alpha_diag: np.ndarray


def build_equivalent_channel(
    re: ChannelRealization, gains: AmplificationGains, K: int, N: int
) -> EquivalentChannel:
    _check_dims(re, K, N)
    NK = N * K
    F = propagation_coeffs(re, gains, K, N)
    h_diag = np.tile(re.h, N)
    g_diag = np.tile(re.g, N)
    alpha_diag = np.tile(gains.alpha.astype(np.float64), N)
    noise_mix = g_diag[:, None] * F * alpha_diag[None, :]
    H_T = noise_mix * h_diag[None, :]
    P_N = np.eye(NK, dtype=np.complex128) + noise_mix @ noise_mix.conj().T
    return EquivalentChannel(
        K=K,
        N=N,
        F=F,
        noise_mix=noise_mix,
        H_T=H_T,
        P_N=P_N,
        h_diag=h_diag,
        g_diag=g_diag,
        alpha_diag=alpha_diag,
    )


def apply_equivalent_channel(
    ec: EquivalentChannel,
    x: np.ndarray,
    relay_noise: np.ndarray,
    rx_noise: np.ndarray,
) -> np.ndarray:
    """Evaluate y = H_T x + noise_mix n + z for (NK, T') symbol matrices."""
    NK = ec.N * ec.K
    for name, arr in (("x", x), ("relay_noise", relay_noise), ("rx_noise", rx_noise)):
        if arr.shape != x.shape or arr.shape[0] != NK:
            raise ValueError(f"{name} must have shape ({NK}, T'), got {arr.shape}")
    return ec.H_T @ x + ec.noise_mix @ relay_noise + rx_noise


def simulate_signal_level(
    re: ChannelRealization,
    gains: AmplificationGains,
    K: int,
    N: int,
    tprime: int,
    x: np.ndarray,
    relay_noise: np.ndarray,
    rx_noise: np.ndarray,
) -> np.ndarray:
    """Replay the slotted relay chain literally.

    Row j (0-based) of every array belongs to transmit slot j+1: x[j] is the
    fresh source symbol heard by the listening relay, relay_noise[j] its
    receive noise, and rx_noise[j] the destination noise in the slot where
    that relay's output is heard (slot j+2). Returns the (NK, tprime)
    received matrix, rows ordered by those receive slots.
    """
    _check_dims(re, K, N)
    NK = N * K
    expected = (NK, tprime)
    for name, arr in (("x", x), ("relay_noise", relay_noise), ("rx_noise", rx_noise)):
        if arr.shape != expected:
            raise ValueError(f"{name} must have shape {expected}, got {arr.shape}")
    y = np.empty((NK, tprime), dtype=np.complex128)
    prev_tx = np.zeros(tprime, dtype=np.complex128)
    for j in range(NK):
        k = j % K
        stored = gains.alpha[k] * (re.h[k] * x[j] + re.i[k] * prev_tx + relay_noise[j])
        y[j] = re.g[k] * stored + rx_noise[j]
        prev_tx = stored
    return y


def _check_dims(re: ChannelRealization, K: int, N: int) -> None:
    if K < 1 or N < 1:
        raise ValueError(f"need K >= 1 and N >= 1, got K={K}, N={N}")
    if re.K != K:
        raise ValueError(f"realization holds {re.K} relays, expected {K}")
