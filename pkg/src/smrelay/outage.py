"""Outage indicators, the Monte Carlo engine, and diversity-order fitting.

Rates are in bits; outage comparisons happen in nats internally (both sides
of each inequality scale by log 2, so the indicator is unchanged). The
Monte Carlo engine counts outages over fixed 65536-trial blocks whose
substreams are addressed by trial index, so estimates are reproducible for
any worker count and any block scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._backend import get_kernels
from .channel import ChannelRealization, interference_mask, stream_key, trial_uniforms
from .scheme import EquivalentChannel, amplification_gains
from .topology import REGIME_INTERFERENCE, REGIME_NO_INTERFERENCE

LN2 = math.log(2.0)

EVENT_ENTIRE = "entire"
EVENT_SUBCHANNEL = "subchannel"

# Stream-key tag for each (event, regime) combination; keeps sweep points on
# disjoint substreams.
_EVENT_CODES = {
    (EVENT_ENTIRE, REGIME_NO_INTERFERENCE): 0,
    (EVENT_ENTIRE, REGIME_INTERFERENCE): 1,
    (EVENT_SUBCHANNEL, REGIME_NO_INTERFERENCE): 2,
}

BLOCK_TRIALS = 1 << 16
_STOP_CHECKS = 10

WILSON_Z95 = 1.959963984540054


def subchannel_rate(h_k: complex, g_k: complex, a_k: float, P: float) -> float:
    """One relay sub-channel's rate in bits: log2(1 + P|g|^2 a^2 |h|^2 / (1 + |g|^2 a^2))."""
    ga2 = abs(g_k) ** 2 * a_k**2
    return math.log1p(P * ga2 * abs(h_k) ** 2 / (1.0 + ga2)) / LN2


def subchannel_rates(re: ChannelRealization, alpha: np.ndarray, P: float) -> np.ndarray:
    """All K sub-channel rates in bits for the given amplitude gains."""
    ga2 = np.abs(re.g) ** 2 * alpha**2
    return np.log1p(P * ga2 * np.abs(re.h) ** 2 / (1.0 + ga2)) / LN2


def outage_no_interference(
    re: ChannelRealization, K: int, N: int, P: float, r: float
) -> bool:
    """Weighted-sum outage N*(R_1+..+R_{K-1}) + (N-1)*R_K <= NKr log2 P.

    The final relay forwards one slot less per block, hence its lighter
    weight; for K = 1 the lone sub-channel carries weight N - 1 against the
    unchanged N r log2 P target.
    """
    if re.K != K:
        raise ValueError(f"realization holds {re.K} relays, expected {K}")
    gains = amplification_gains(re, P, REGIME_NO_INTERFERENCE)
    rates = subchannel_rates(re, gains.alpha, P)
    weights = np.full(K, float(N))
    weights[K - 1] = float(N - 1)
    return bool(weights @ rates <= N * K * r * math.log2(P))


def capacity_logdet_nats(ec: EquivalentChannel, P: float) -> float:
    """log det(I + P H_T H_T^H P_N^{-1}) in nats, via Cholesky whitening."""
    NK = ec.N * ec.K
    L = np.linalg.cholesky(ec.P_N)
    white = np.linalg.solve(L, ec.H_T)
    gram = np.eye(NK, dtype=np.complex128) + P * (white @ white.conj().T)
    diag = np.diagonal(np.linalg.cholesky(gram)).real
    return 2.0 * float(np.sum(np.log(diag)))


def capacity_logdet_nats_eig(ec: EquivalentChannel, P: float) -> float:
    """Same quantity through a full eigendecomposition; slow dual path for checks."""
    w, U = np.linalg.eigh(ec.P_N)
    inv_sqrt = (U * (1.0 / np.sqrt(w))) @ U.conj().T
    S = inv_sqrt @ ec.H_T
    lam = np.maximum(np.linalg.eigvalsh(S @ S.conj().T), 0.0)
    return float(np.sum(np.log1p(P * lam)))


def outage_general(ec: EquivalentChannel, P: float, r: float) -> bool:
    """Log-det outage: block mutual information below (NK+1) r log P nats."""
    NK = ec.N * ec.K
    return bool(capacity_logdet_nats(ec, P) <= (NK + 1) * r * math.log(P))


@dataclass(frozen=True)
class OutageEstimate:
    """Monte Carlo outage estimate with a 95% Wilson interval."""

    P: float
    r: float
    trials: int
    outages: int
    p_hat: float
    ci95: tuple


def wilson_interval(successes: int, n: int, z: float = WILSON_Z95) -> tuple:
    """Wilson score interval; well behaved at zero observed successes."""
    if n <= 0:
        raise ValueError(f"need a positive sample size, got {n}")
    if not 0 <= successes <= n:
        raise ValueError(f"successes {successes} outside 0..{n}")
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    # Analytically the interval ends exactly at 0 (or 1) when nothing (or
    # everything) was observed; pin those ends against round-off.
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return (lo, hi)


def _point_tags(code: int, K: int, N: int, P: float, r: float) -> tuple:
    db = 10.0 * math.log10(P)
    return (code, K, N, int(round(db * 1000.0)) + (1 << 31), int(round(r * 1e9)))


def _count_block(kernels, key, lo, hi, cfg, P, r, event, imask) -> int:
    u = trial_uniforms(key, lo, hi, cfg.K)
    if event == EVENT_SUBCHANNEL:
        return kernels.count_subchannel_outages(u, P, r)
    if cfg.regime == REGIME_NO_INTERFERENCE:
        return kernels.count_ni_outages(u, cfg.K, cfg.N, P, r)
    return kernels.count_general_outages(u, cfg.K, cfg.N, P, r, imask)


def monte_carlo_outage(
    cfg,
    P: float,
    r: float,
    trials: Optional[int] = None,
    min_outages: Optional[int] = None,
    workers: int = 1,
    event: str = EVENT_ENTIRE,
) -> OutageEstimate:
    """Estimate the outage probability at SNR P and multiplexing gain r.

    Trials run in ten fixed chunks; after each chunk the run stops early once
    min_outages outages have accumulated, so between trials/10 and trials
    trials execute. Chunk and block boundaries depend only on `trials`, and
    every trial owns a fixed RNG substream, so the estimate is identical for
    any `workers` value.
    """
    trials = cfg.trials if trials is None else int(trials)
    min_outages = cfg.min_outages if min_outages is None else int(min_outages)
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if min_outages < 1:
        raise ValueError(f"need a positive outage floor, got {min_outages}")
    if P <= 0.0:
        raise ValueError(f"SNR must be positive, got {P}")
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"multiplexing gain must lie in [0, 1], got {r}")
    if workers < 1:
        raise ValueError(f"need at least one worker, got {workers}")
    if event == EVENT_SUBCHANNEL and cfg.K != 1:
        raise ValueError("sub-channel estimates use a single-relay configuration")
    try:
        code = _EVENT_CODES[(event, cfg.regime)]
    except KeyError:
        raise ValueError(f"unsupported event {event!r} for regime {cfg.regime!r}") from None
    key = stream_key(cfg.seed, *_point_tags(code, cfg.K, cfg.N, P, r))
    imask = interference_mask(cfg.K, cfg.regime, cfg.graph)
    kernels = get_kernels()

    cuts = sorted({-(-trials * s // _STOP_CHECKS) for s in range(1, _STOP_CHECKS + 1)})
    done = 0
    outages = 0
    for cut in cuts:
        spans = [(lo, min(lo + BLOCK_TRIALS, cut)) for lo in range(done, cut, BLOCK_TRIALS)]
        if workers > 1 and len(spans) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                counts = list(
                    pool.map(
                        lambda span: _count_block(
                            kernels, key, span[0], span[1], cfg, P, r, event, imask
                        ),
                        spans,
                    )
                )
        else:
            counts = [
                _count_block(kernels, key, lo, hi, cfg, P, r, event, imask)
                for lo, hi in spans
            ]
        outages += int(sum(counts))
        done = cut
        if outages >= min_outages:
            break
    p_hat = outages / done
    return OutageEstimate(
        P=float(P),
        r=float(r),
        trials=done,
        outages=outages,
        p_hat=p_hat,
        ci95=wilson_interval(outages, done),
    )


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares diversity order: slope of -log10 p_hat against log10 P."""

    points: tuple
    slope: float
    stderr: float


def fit_diversity_slope(estimates: Sequence[OutageEstimate]) -> SlopeFit:
    """Fit the high-SNR decay order of a sweep's outage estimates.

    Zero-outage points carry no slope information and are dropped; at least
    three usable points at distinct SNRs are required.
    """
    pts = sorted(
        (math.log10(e.P), -math.log10(e.p_hat)) for e in estimates if e.p_hat > 0.0
    )
    if len(pts) < 3 or len({x for x, _ in pts}) < 3:
        raise ValueError("need at least three positive-outage points at distinct SNRs")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    dx = x - x.mean()
    sxx = float(dx @ dx)
    slope = float(dx @ (y - y.mean())) / sxx
    resid = y - (y.mean() + slope * dx)
    stderr = math.sqrt(float(resid @ resid) / (len(pts) - 2) / sxx)
    return SlopeFit(points=tuple(pts), slope=slope, stderr=stderr)
