"""End-to-end acceptance checks for the scheme's published behavior.

Each test prints one PASS/FAIL line (visible under `pytest -s`) and then
asserts, so a red run still shows which guarantees held. The slope checks
run millions of Monte Carlo trials and take a few minutes in total.
"""

import math
import time

import numpy as np
import pytest

from smrelay import SchemeConfig, fit_diversity_slope, monte_carlo_outage
from smrelay.channel import interference_mask, sample_realization, stream_key
from smrelay.cli import main
from smrelay.dmt import dmt_theorem1, lp_oracle_ni, lp_vertex_min
from smrelay.outage import (
    EVENT_SUBCHANNEL,
    capacity_logdet_nats,
    subchannel_rates,
)
from smrelay.scheme import (
    amplification_gains,
    apply_equivalent_channel,
    build_equivalent_channel,
    simulate_signal_level,
)
from smrelay.topology import (
    REGIME_INTERFERENCE,
    InterferenceGraph,
    cycle_is_non_interfering,
    hamiltonian_relay_order,
)

DB_SWEEP = (20.0, 25.0, 30.0, 35.0, 40.0, 45.0)
LN2 = math.log(2.0)


def report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"[{num}] {name:<38s} {'PASS' if ok else 'FAIL'}  ({detail})")


def sweep_slope(cfg: SchemeConfig, r: float, event: str = "entire"):
    ests = [
        monte_carlo_outage(cfg, 10.0 ** (db / 10.0), r, event=event)
        for db in DB_SWEEP
    ]
    return fit_diversity_slope(ests)


class TestClosedFormCurve:
    def test_matches_vertex_program_everywhere(self):
        started = time.monotonic()
        max_dev = 0.0
        for K in (1, 2, 3, 4):
            for N in (2, 3, 4, 5, 6):
                for i in range(101):
                    r = i / 100
                    dev = abs(dmt_theorem1(K, N, r) - lp_vertex_min(K, N, r))
                    max_dev = max(max_dev, dev)
        grid_checked = 0
        for K in (1, 2, 3):
            for N in (2, 4):
                for i in range(11):
                    lp_oracle_ni(K, N, i / 10, grid_step=0.01)
                    grid_checked += 1
        elapsed = time.monotonic() - started
        ok = max_dev <= 1e-9 and elapsed < 60.0
        report(
            1,
            "closed form vs vertex program",
            ok,
            f"max dev {max_dev:.3g}, {grid_checked} grid cross-checks, {elapsed:.1f}s",
        )
        assert max_dev <= 1e-9
        assert elapsed < 60.0


class TestSignalMatrixAgreement:
    def test_simulator_equals_matrix_model(self):
        seed, tprime = 2001, 8
        worst = 0.0
        for K in (2, 3, 4):
            for N in (1, 2, 3):
                key = stream_key(seed, K, N)
                imask = interference_mask(K, REGIME_INTERFERENCE)
                NK = N * K
                for t in range(100):
                    re = sample_realization(key, t, K, imask)
                    P = (10.0, 1e4)[t % 2]
                    gains = amplification_gains(re, P, REGIME_INTERFERENCE)
                    ec = build_equivalent_channel(re, gains, K, N)
                    rng = np.random.default_rng(
                        np.random.SeedSequence([seed, 7, K, N, t])
                    )
                    x, n, z = (
                        (rng.standard_normal((NK, tprime))
                         + 1j * rng.standard_normal((NK, tprime)))
                        / math.sqrt(2.0)
                        for _ in range(3)
                    )
                    y_sim = simulate_signal_level(re, gains, K, N, tprime, x, n, z)
                    y_mat = apply_equivalent_channel(ec, x, n, z)
                    scale = max(float(np.linalg.norm(y_sim)), 1e-30)
                    worst = max(worst, float(np.linalg.norm(y_sim - y_mat)) / scale)
        ok = worst <= 1e-9
        report(2, "slot simulator vs matrix model", ok, f"max rel err {worst:.3g}")
        assert ok


class TestSpectralBounds:
    def test_propagation_and_noise_bounds(self):
        seed = 2002
        combos = [(K, N) for K in (2, 3, 4) for N in (1, 2, 3)]
        per_combo = -(-10**4 // len(combos))
        snrs = (10.0, 100.0, 1e4, 1e8)
        checked = conditioned = violations = 0
        max_entry = max_f_ratio = max_cov_ratio = 0.0
        for K, N in combos:
            key = stream_key(seed, K, N)
            imask = interference_mask(K, REGIME_INTERFERENCE)
            NK = N * K
            for t in range(per_combo):
                re = sample_realization(key, t, K, imask)
                gains = amplification_gains(re, snrs[t % len(snrs)], REGIME_INTERFERENCE)
                ec = build_equivalent_channel(re, gains, K, N)
                checked += 1
                entry = float(np.abs(ec.F).max())
                f_eig = float(np.linalg.eigvalsh(ec.F @ ec.F.conj().T).max())
                max_entry = max(max_entry, entry)
                max_f_ratio = max(max_f_ratio, f_eig / NK**2)
                if entry > 1.0 + 1e-12 or f_eig > NK**2 + 1e-9:
                    violations += 1
                if float(np.abs(re.g).max()) <= 1.0:
                    conditioned += 1
                    p_eig = float(np.linalg.eigvalsh(ec.P_N).max())
                    max_cov_ratio = max(max_cov_ratio, p_eig / (NK**2 + 1.0))
                    if p_eig > NK**2 + 1.0 + 1e-9:
                        violations += 1
        ok = violations == 0 and checked >= 10**4 and conditioned > 0
        report(
            3,
            "propagation and covariance bounds",
            ok,
            f"{checked} realizations, max|F| {max_entry:.6f}, "
            f"max eig ratio {max_f_ratio:.3g}, {conditioned} conditioned, "
            f"max cov ratio {max_cov_ratio:.3g}, {violations} violations",
        )
        assert ok


class TestSubchannelSlope:
    def test_single_relay_decay_orders(self):
        results = []
        for r in (0.25, 0.5):
            cfg = SchemeConfig(K=1, N=2, trials=10**6, min_outages=10**6, seed=101)
            fit = sweep_slope(cfg, r, event=EVENT_SUBCHANNEL)
            results.append((r, fit.slope, abs(fit.slope - (1.0 - r))))
        ok = all(err <= 0.15 for _, _, err in results)
        detail = ", ".join(
            f"r={r:g}: slope {slope:.3f} vs {1 - r:g}" for r, slope, _ in results
        )
        report(4, "single sub-channel decay order", ok, detail)
        assert ok

    def test_full_scheme_decay_order(self):
        cfg = SchemeConfig(K=2, N=2, trials=10**6, min_outages=10**6, seed=102)
        fit = sweep_slope(cfg, 0.5)
        err = abs(fit.slope - 0.5)
        ok = err <= 0.2
        report(5, "weighted-sum outage decay order", ok, f"slope {fit.slope:.3f} vs 0.5")
        assert ok

    def test_interference_decay_order_meets_bound(self):
        cfg = SchemeConfig(
            K=2, N=2, regime=REGIME_INTERFERENCE, trials=10**6,
            min_outages=10**6, seed=103,
        )
        fit = sweep_slope(cfg, 0.5)
        ok = fit.slope >= 0.75 - 0.3
        report(
            6,
            "log-det outage decay order",
            ok,
            f"slope {fit.slope:.3f} vs lower bound 0.75 - 0.3",
        )
        assert ok


class TestBlockDiagonalReduction:
    def test_logdet_splits_without_interference(self):
        seed = 2007
        combos = ((2, 2), (3, 2), (2, 3), (4, 3))
        per_combo = 250
        worst = 0.0
        for K, N in combos:
            key = stream_key(seed, K, N)
            imask = np.zeros(K)
            for t in range(per_combo):
                re = sample_realization(key, t, K, imask)
                P = (10.0, 1e4)[t % 2]
                gains = amplification_gains(re, P, REGIME_INTERFERENCE)
                ec = build_equivalent_channel(re, gains, K, N)
                nats = capacity_logdet_nats(ec, P)
                split = N * LN2 * float(np.sum(subchannel_rates(re, gains.alpha, P)))
                worst = max(worst, abs(nats - split) / max(1.0, abs(nats)))
        ok = worst <= 1e-9
        report(
            7,
            "block-diagonal log-det identity",
            ok,
            f"{per_combo * len(combos)} realizations, max rel err {worst:.3g}",
        )
        assert ok


class TestHamiltonianSchedule:
    def test_complete_and_star_graphs(self):
        complete_free = InterferenceGraph.from_pairs(5, ())
        order = hamiltonian_relay_order(complete_free)
        found = order is not None and cycle_is_non_interfering(order, complete_free)
        edge_ok = found
        if found:
            ring = list(order) + [order[0]]
            for a, b in zip(ring, ring[1:]):
                if complete_free.interferes(a, b):
                    edge_ok = False
        # Only the hub pairs are interference-free, so no cycle can exist.
        star_free = InterferenceGraph.from_pairs(4, ((2, 3), (2, 4), (3, 4)))
        none_ok = hamiltonian_relay_order(star_free) is None
        ok = found and edge_ok and none_ok
        report(
            8,
            "interference-free relay cycles",
            ok,
            f"complete K=5 -> {' '.join(map(str, order or ()))}, star K=4 -> none",
        )
        assert ok


class TestSweepDeterminism:
    def test_worker_count_and_rerun_byte_identical(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "k = 2\nn = 2\nsnr_db = 20\nr = 0.5\n"
            "trials = 700001\nmin_outages = 100\nseed = 33\n"
        )
        digests = []
        for tag, workers in (("a", 1), ("b", 2), ("c", 5), ("d", 1)):
            out = tmp_path / f"sweep_{tag}.csv"
            code = main(
                ["outage-sweep", "--config", str(cfg), "--out", str(out),
                 "--workers", str(workers)]
            )
            assert code == 0
            digests.append(out.read_bytes())
        ok = all(d == digests[0] for d in digests[1:])
        report(
            9,
            "sweep reruns are byte-identical",
            ok,
            f"workers 1/2/5 plus rerun, {len(digests[0])} bytes each",
        )
        assert ok
