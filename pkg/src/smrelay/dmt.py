"""Closed-form diversity-multiplexing curves and an exact outage-exponent program.

The achievable curve of the scheme, its interference-case lower bound, and
the cut-set upper bound are piecewise-linear in the multiplexing gain r.
The linear program here recomputes the no-interference curve from its
outage-exponent region without using the closed form, serving as an
independent cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

SOURCE_THEOREM1 = "theorem1"
SOURCE_THEOREM2_LOWER = "theorem2-lower"
SOURCE_UPPER_BOUND = "upper-bound"
SOURCE_LP_ORACLE = "lp-oracle"
SOURCE_MC_FIT = "mc-fit"

_FEAS_EPS = 1e-12

GRID_ORACLE_MAX_K = 3


def _check_curve_args(K: int, N: int) -> None:
    if K < 1:
        raise ValueError(f"need at least one relay, got K={K}")
    if N < 2:
        raise ValueError(f"need at least two sub-blocks, got N={N}")


def _check_r(r: float) -> None:
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"multiplexing gain must lie in [0, 1], got {r}")


def dmt_theorem1(K: int, N: int, r: float) -> float:
    """Diversity order of the scheme without inter-relay interference.

    max{0, K(1-r) - 1/N, K(1-r) - Kr/(N-1)}: three linear pieces whose
    active branch switches at r = (N-1)/(NK) and which reaches zero at
    r = 1 - 1/(NK).
    """
    _check_curve_args(K, N)
    _check_r(r)
    base = K * (1.0 - r)
    return max(0.0, base - 1.0 / N, base - K * r / (N - 1.0))


def dmt_theorem2_lower(K: int, N: int, r: float) -> float:
    """Lower bound on the diversity order with inter-relay interference.

    max{0, K(1-r) - r/N}; defined for K >= 2 since a single relay cannot
    interfere with itself.
    """
    _check_curve_args(K, N)
    if K < 2:
        raise ValueError(f"the interference bound needs K >= 2, got K={K}")
    _check_r(r)
    return max(0.0, K * (1.0 - r) - r / N)


def dmt_upper_bound(K: int, r: float) -> float:
    """Cut-set upper bound K(1-r) for K single-antenna relays."""
    if K < 1:
        raise ValueError(f"need at least one relay, got K={K}")
    _check_r(r)
    return K * (1.0 - r)


def theorem1_breakpoints(K: int, N: int) -> tuple:
    """The r values where the no-interference curve changes slope and hits zero."""
    _check_curve_args(K, N)
    return ((N - 1.0) / (N * K), 1.0 - 1.0 / (N * K))


def lp_vertex_min(K: int, N: int, r: float) -> float:
    """Exact minimum of K - sum(r_k) over the outage-exponent region.

    The region is the box [0,1]^K cut by the half-space
    N*(r_1+..+r_{K-1}) + (N-1)*r_K <= NKr. A linear objective attains its
    minimum at a vertex: a box corner, or a point with K-1 coordinates in
    {0,1} and the remaining one pinned by the cutting plane.
    """
    _check_curve_args(K, N)
    _check_r(r)
    a = np.full(K, float(N))
    a[K - 1] = float(N - 1)
    b = N * K * r
    best = 0.0  # the origin is always feasible
    for corner in itertools.product((0.0, 1.0), repeat=K):
        v = np.array(corner)
        if float(a @ v) <= b + _FEAS_EPS:
            best = max(best, float(v.sum()))
    for free in range(K):
        others = [k for k in range(K) if k != free]
        for corner in itertools.product((0.0, 1.0), repeat=K - 1):
            s = sum(a[k] * c for k, c in zip(others, corner))
            pinned = (b - s) / a[free]
            if -_FEAS_EPS <= pinned <= 1.0 + _FEAS_EPS:
                best = max(best, sum(corner) + min(1.0, max(0.0, pinned)))
    return K - best


def lp_grid_min(K: int, N: int, r: float, grid_step: float) -> float:
    """Dense-grid minimum of the same program; exponential in K, for cross-checks."""
    _check_curve_args(K, N)
    _check_r(r)
    if K > GRID_ORACLE_MAX_K:
        raise ValueError(f"the grid oracle supports K <= {GRID_ORACLE_MAX_K}, got K={K}")
    if not 0.0 < grid_step <= 0.5:
        raise ValueError(f"grid step must lie in (0, 0.5], got {grid_step}")
    n = int(round(1.0 / grid_step))
    axis = np.arange(n + 1) / n
    grids = np.meshgrid(*([axis] * K), indexing="ij")
    lhs = (N - 1.0) * grids[-1]
    for gr in grids[:-1]:
        lhs = lhs + N * gr
    total = grids[0].copy()
    for gr in grids[1:]:
        total = total + gr
    feasible = lhs <= N * K * r + _FEAS_EPS
    return K - float(total[feasible].max())


def lp_oracle_ni(
    K: int, N: int, r: float, grid_step: Optional[float] = None
) -> float:
    """Outage-exponent program solved exactly by vertex enumeration.

    When grid_step is given, a dense grid search (K <= 3) must agree within
    K * grid_step; disagreement raises, since it means one oracle is wrong.
    """
    exact = lp_vertex_min(K, N, r)
    if grid_step is not None:
        approx = lp_grid_min(K, N, r, grid_step)
        if abs(exact - approx) > K * grid_step + _FEAS_EPS:
            raise RuntimeError(
                f"vertex and grid oracles disagree at (K={K}, N={N}, r={r}): "
                f"{exact} vs {approx}"
            )
    return exact


@dataclass(frozen=True)
class DmtCurve:
    """One named diversity-multiplexing curve sampled on an r grid."""

    source: str
    K: int
    N: Optional[int]
    points: tuple

    def d_at(self, r: float) -> float:
        for rr, dd in self.points:
            if rr == r:
                return dd
        raise KeyError(f"r={r} not on this curve's grid")


def theory_curves(K: int, N: int, r_values: Sequence[float]) -> list:
    """All closed-form curves plus the program oracle on a common r grid."""
    rs = tuple(float(r) for r in r_values)
    curves = [
        DmtCurve(SOURCE_THEOREM1, K, N, tuple((r, dmt_theorem1(K, N, r)) for r in rs))
    ]
    if K >= 2:
        curves.append(
            DmtCurve(
                SOURCE_THEOREM2_LOWER,
                K,
                N,
                tuple((r, dmt_theorem2_lower(K, N, r)) for r in rs),
            )
        )
    curves.append(
        DmtCurve(SOURCE_UPPER_BOUND, K, None, tuple((r, dmt_upper_bound(K, r)) for r in rs))
    )
    curves.append(
        DmtCurve(SOURCE_LP_ORACLE, K, N, tuple((r, lp_vertex_min(K, N, r)) for r in rs))
    )
    return curves
