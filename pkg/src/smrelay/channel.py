"""Rayleigh block-fading channel sampling on counter-addressable substreams.

Each Monte Carlo trial owns a fixed window of Philox counter space, so the
uniforms behind trial t are the same no matter how a batch is split into
blocks or spread across workers. Gains are unit-variance circularly
symmetric complex Gaussians built from an exponential magnitude and a
uniform phase (two uniforms per gain, fixed consumption per trial).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.random import Philox, SeedSequence

from .topology import (
    REGIME_INTERFERENCE,
    REGIME_NO_INTERFERENCE,
    InterferenceGraph,
    prev_relay,
)

_U53_SCALE = 1.0 / (1 << 53)

# Clamp for uniforms before -log(u): keeps magnitudes finite without a
# resample loop, so per-trial counter consumption stays fixed.
UNIFORM_FLOOR = 2.0**-64

# Uniform layout per trial: [h mag | h phase | g mag | g phase | i mag | i phase],
# each segment K wide.
UNIFORMS_PER_TRIAL_FACTOR = 6


def words_per_trial(K: int) -> int:
    """Philox words reserved per trial (6K uniforms rounded up to whole 4-word blocks)."""
    return 4 * ((UNIFORMS_PER_TRIAL_FACTOR * K + 3) // 4)


def stream_key(seed: int, *tags: int) -> np.ndarray:
    """128-bit Philox key for one (seed, sweep-point) substream family.

    Tags are folded to unsigned 64-bit so negative encodings stay valid
    SeedSequence entropy.
    """
    entropy = [int(seed)] + [int(t) & 0xFFFFFFFFFFFFFFFF for t in tags]
    return SeedSequence(entropy).generate_state(2, np.uint64)


def trial_uniforms(key: np.ndarray, lo: int, hi: int, K: int) -> np.ndarray:
    """Uniforms in [0, 1) for trials [lo, hi), shape (hi-lo, words_per_trial(K)).

    Identical for any enclosing batch split: trial t always starts at Philox
    counter t * words_per_trial(K) / 4.
    """
    if not 0 <= lo <= hi:
        raise ValueError(f"bad trial range [{lo}, {hi})")
    wpt = words_per_trial(K)
    n = hi - lo
    if n == 0:
        return np.empty((0, wpt), dtype=np.float64)
    bitgen = Philox(key=key, counter=lo * (wpt // 4))
    raw = bitgen.random_raw(n * wpt).reshape(n, wpt)
    return (raw >> np.uint64(11)) * _U53_SCALE


def _complex_gains(u_mag: np.ndarray, u_phase: np.ndarray) -> np.ndarray:
    energy = -np.log(np.maximum(u_mag, UNIFORM_FLOOR))
    return np.sqrt(energy) * np.exp(2j * np.pi * u_phase)


def gains_from_uniforms(u: np.ndarray, K: int, imask: np.ndarray):
    """Decode per-trial uniforms into (h, g, i) gain arrays of shape (trials, K).

    imask zeroes the interference gain of relays whose incoming pair does not
    interfere, keeping those entries exactly 0.
    """
    h = _complex_gains(u[:, 0:K], u[:, K : 2 * K])
    g = _complex_gains(u[:, 2 * K : 3 * K], u[:, 3 * K : 4 * K])
    i = _complex_gains(u[:, 4 * K : 5 * K], u[:, 5 * K : 6 * K]) * imask
    return h, g, i


@dataclass(frozen=True)
class ChannelRealization:
    """One block's gains; index k-1 holds relay k's uplink h, downlink g, and
    incoming interference i (from its cyclic predecessor)."""

    h: np.ndarray
    g: np.ndarray
    i: np.ndarray

    @property
    def K(self) -> int:
        return self.h.shape[0]


def interference_mask(
    K: int, regime: str, graph: Optional[InterferenceGraph] = None
) -> np.ndarray:
    """Per-relay 0/1 weights for the incoming interference gain.

    Relay k hears its cyclic predecessor iff the pair (k, prev(k)) is an edge
    of the interference graph; the no-interference regime masks everything.
    """
    if regime == REGIME_NO_INTERFERENCE:
        return np.zeros(K, dtype=np.float64)
    if regime != REGIME_INTERFERENCE:
        raise ValueError(f"unknown regime {regime!r}")
    if K < 2:
        raise ValueError("the interference regime needs K >= 2")
    if graph is None:
        graph = InterferenceGraph.complete(K)
    mask = np.zeros(K, dtype=np.float64)
    for k in range(1, K + 1):
        if graph.interferes(k, prev_relay(k, K)):
            mask[k - 1] = 1.0
    return mask


def sample_realization(
    key: np.ndarray, trial: int, K: int, imask: np.ndarray
) -> ChannelRealization:
    """Gains for a single trial index on the given substream."""
    u = trial_uniforms(key, trial, trial + 1, K)
    h, g, i = gains_from_uniforms(u, K, imask)
    return ChannelRealization(h=h[0], g=g[0], i=i[0])


def sample_channel(cfg, trial: int, point_tags: tuple = ()) -> ChannelRealization:
    """Gains for one trial of a configured run (substream keyed by cfg.seed and tags)."""
    key = stream_key(cfg.seed, *point_tags)
    imask = interference_mask(cfg.K, cfg.regime, cfg.graph)
    return sample_realization(key, trial, cfg.K, imask)


@dataclass(frozen=True)
class SnrExponents:
    """Per-gain decay orders at SNR P: exponent e means the squared gain is P**-e."""

    mu: np.ndarray
    nu: np.ndarray
    omega: np.ndarray
    P: float


def snr_exponents(re: ChannelRealization, P: float) -> SnrExponents:
    """Decay orders of |h|^2, |g|^2, |i|^2 against SNR P (> 1).

    Zero gains map to +inf, the maximal decay order.
    """
    if P <= 1.0:
        raise ValueError(f"exponents need P > 1, got {P}")
    ln_p = np.log(P)

    def expo(z: np.ndarray) -> np.ndarray:
        mag = np.abs(z) ** 2
        with np.errstate(divide="ignore"):
            return np.where(mag > 0.0, -np.log(mag) / ln_p, np.inf)

    return SnrExponents(mu=expo(re.h), nu=expo(re.g), omega=expo(re.i), P=float(P))
