"""Relay indexing, slot schedules, and interference-graph utilities.

Relays are numbered 1..K. Time is divided into sub-blocks 1..N of K slots
each; during slot (n, k) the source transmits a fresh symbol, relay k
listens, and the relay that listened in the previous slot forwards. Relay
ids and slot numbers are 1-based throughout this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

LAYOUT_NO_INTERFERENCE = "no-interference"
LAYOUT_GENERAL = "general"

REGIME_NO_INTERFERENCE = "no-interference"
REGIME_INTERFERENCE = "interference"
REGIMES = (REGIME_NO_INTERFERENCE, REGIME_INTERFERENCE)

# Exact Hamiltonian-cycle search is exponential in the worst case; beyond
# this size the CLI refuses rather than hanging.
HAMILTONIAN_MAX_NODES = 12


class CapabilityError(RuntimeError):
    """Requested an exact computation beyond the supported problem size."""


def prev_relay(k: int, K: int) -> int:
    """Cyclic predecessor of relay k: the relay that forwards while k listens."""
    if K < 1:
        raise ValueError(f"need at least one relay, got K={K}")
    if not 1 <= k <= K:
        raise ValueError(f"relay index {k} outside 1..{K}")
    return (k - 2) % K + 1


def prev_slot(n: int, k: int, K: int) -> tuple[int, int]:
    """Slot (n', k') during which relay prev(k) received what it forwards in (n, k).

    k' = prev_relay(k); the sub-block index drops by one exactly when the
    predecessor wraps around (k' = K).
    """
    pk = prev_relay(k, K)
    return (n - 1, pk) if pk == K else (n, pk)


def slot_relay(j: int, K: int) -> int:
    """Relay listening during 1-based transmit slot j."""
    if j < 1:
        raise ValueError(f"slot index {j} must be >= 1")
    return (j - 1) % K + 1


@dataclass(frozen=True)
class SlotRole:
    """What happens during one slot: source activity plus relay roles."""

    tx_active: bool
    rx_relay: Optional[int]
    fw_relay: Optional[int]


@dataclass(frozen=True)
class Schedule:
    """Per-slot roles for one transmission block."""

    K: int
    N: int
    layout: str
    slots: tuple[SlotRole, ...]

    @property
    def slots_total(self) -> int:
        return len(self.slots)


def build_schedule(K: int, N: int, layout: str) -> Schedule:
    """Enumerate slot roles for a block.

    The no-interference layout uses NK slots: every relay receives once per
    sub-block except that the final slot carries no fresh symbol, so the last
    relay of the last sub-block stays idle and the source is active in slots
    1..NK-1. The general layout appends one flush slot: the source is active
    in slots 1..NK, every relay receives N times, and forwards happen in
    slots 2..NK+1.
    """
    if K < 1:
        raise ValueError(f"need at least one relay, got K={K}")
    if N < 2:
        raise ValueError(f"need at least two sub-blocks, got N={N}")
    slots = []
    if layout == LAYOUT_NO_INTERFERENCE:
        total = N * K
        for j in range(1, total + 1):
            rx = slot_relay(j, K) if j < total else None
            fw = slot_relay(j - 1, K) if j > 1 else None
            slots.append(SlotRole(tx_active=j < total, rx_relay=rx, fw_relay=fw))
    elif layout == LAYOUT_GENERAL:
        if K < 2:
            raise ValueError("the general layout is defined for K >= 2")
        total = N * K + 1
        for j in range(1, total + 1):
            rx = slot_relay(j, K) if j <= N * K else None
            fw = slot_relay(j - 1, K) if j > 1 else None
            slots.append(SlotRole(tx_active=j <= N * K, rx_relay=rx, fw_relay=fw))
    else:
        raise ValueError(f"unknown layout {layout!r}")
    return Schedule(K=K, N=N, layout=layout, slots=tuple(slots))


def _normalize_edge(a: int, b: int, K: int) -> tuple[int, int]:
    if a == b:
        raise ValueError(f"self-pair ({a}, {b}) is not a valid relay pair")
    if not (1 <= a <= K and 1 <= b <= K):
        raise ValueError(f"pair ({a}, {b}) outside 1..{K}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class InterferenceGraph:
    """Undirected graph on relays 1..K; an edge means the pair interferes."""

    K: int
    edges: frozenset

    @classmethod
    def from_pairs(cls, K: int, pairs: Iterable[tuple[int, int]]) -> "InterferenceGraph":
        if K < 1:
            raise ValueError(f"need at least one relay, got K={K}")
        return cls(K=K, edges=frozenset(_normalize_edge(a, b, K) for a, b in pairs))

    @classmethod
    def complete(cls, K: int) -> "InterferenceGraph":
        """Every relay pair interferes (the worst case)."""
        return cls.from_pairs(K, combinations(range(1, K + 1), 2))

    @classmethod
    def none(cls, K: int) -> "InterferenceGraph":
        """No pair interferes."""
        return cls.from_pairs(K, ())

    def interferes(self, a: int, b: int) -> bool:
        return _normalize_edge(a, b, self.K) in self.edges

    def non_interfering_adjacency(self) -> dict[int, set[int]]:
        """Adjacency of the complement graph (pairs that may be scheduled adjacently)."""
        adj: dict[int, set[int]] = {v: set() for v in range(1, self.K + 1)}
        for a, b in combinations(range(1, self.K + 1), 2):
            if (a, b) not in self.edges:
                adj[a].add(b)
                adj[b].add(a)
        return adj


def cycle_is_non_interfering(order: list[int], graph: InterferenceGraph) -> bool:
    """True if consecutive relays in the cyclic order never interfere."""
    if sorted(order) != list(range(1, graph.K + 1)):
        raise ValueError("order must visit every relay exactly once")
    if graph.K == 1:
        return True
    if graph.K == 2:
        return not graph.interferes(order[0], order[1])
    return all(
        not graph.interferes(order[m], order[(m + 1) % len(order)])
        for m in range(len(order))
    )


def hamiltonian_relay_order(graph: InterferenceGraph) -> Optional[list[int]]:
    """A cyclic relay order whose consecutive pairs never interfere, or None.

    Exact backtracking on the complement (non-interference) graph, anchored
    at relay 1. K = 1 is trivially orderable; K = 2 reduces to the single
    pair being non-interfering. Sizes above HAMILTONIAN_MAX_NODES raise
    CapabilityError instead of risking an exponential search.
    """
    K = graph.K
    if K > HAMILTONIAN_MAX_NODES:
        raise CapabilityError(
            f"exact cycle search supports up to {HAMILTONIAN_MAX_NODES} relays, got {K}"
        )
    if K == 1:
        return [1]
    if K == 2:
        return [1, 2] if not graph.interferes(1, 2) else None
    adj = graph.non_interfering_adjacency()
    order = [1]
    used = {1}

    def extend() -> bool:
        if len(order) == K:
            return order[0] in adj[order[-1]]
        for v in sorted(adj[order[-1]]):
            if v not in used:
                order.append(v)
                used.add(v)
                if extend():
                    return True
                order.pop()
                used.remove(v)
        return False

    return order if extend() else None
