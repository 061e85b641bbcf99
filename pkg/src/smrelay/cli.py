"""Command line interface: theory curves, Monte Carlo sweeps, slope fits,
self-verification, and interference-aware relay ordering.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
All CSV output uses a fixed column order and round-trip float formatting,
so reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .channel import interference_mask, sample_realization, stream_key
from .config import ConfigError, SchemeConfig, load_config
from .dmt import dmt_theorem1, dmt_theorem2_lower, lp_oracle_ni, lp_vertex_min, theory_curves
from .outage import OutageEstimate, fit_diversity_slope, monte_carlo_outage
from .scheme import (
    amplification_gains,
    apply_equivalent_channel,
    build_equivalent_channel,
    simulate_signal_level,
)
from .topology import (
    LAYOUT_GENERAL,
    LAYOUT_NO_INTERFERENCE,
    REGIME_INTERFERENCE,
    REGIME_NO_INTERFERENCE,
    CapabilityError,
    InterferenceGraph,
    build_schedule,
    cycle_is_non_interfering,
    hamiltonian_relay_order,
)

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2

SWEEP_COLUMNS = (
    "regime",
    "K",
    "N",
    "r",
    "snr_db",
    "trials",
    "outages",
    "p_hat",
    "ci_lo",
    "ci_hi",
)
DMT_COLUMNS = ("source", "K", "N", "r", "d")
FIT_COLUMNS = ("regime", "K", "N", "r", "d_hat", "stderr", "d_theory", "d_lower")


def _fmt(value) -> str:
    """Deterministic cell formatting: ints plain, floats round-trip, None blank."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_dmt_theory(cfg: SchemeConfig, out: Path) -> int:
    """Write every closed-form curve plus the program oracle on cfg's r grid."""
    rows = []
    for curve in theory_curves(cfg.K, cfg.N, cfg.r_list):
        for r, d in curve.points:
            rows.append(
                [curve.source, _fmt(curve.K), _fmt(curve.N), _fmt(r), _fmt(d)]
            )
    _write_csv(out, DMT_COLUMNS, rows)
    LOGGER.info("wrote %d curve rows to %s", len(rows), out)
    return EXIT_OK


def cmd_outage_sweep(cfg: SchemeConfig, out: Path, workers: int) -> int:
    """Monte Carlo outage estimates over the configured (r, SNR) grid."""
    rows = []
    for r in cfg.r_list:
        for db in cfg.snr_db:
            P = 10.0 ** (db / 10.0)
            est = monte_carlo_outage(cfg, P, r, workers=workers)
            LOGGER.info(
                "r=%g snr=%g dB: p_hat=%g (%d/%d)", r, db, est.p_hat, est.outages, est.trials
            )
            rows.append(
                [
                    cfg.regime,
                    _fmt(cfg.K),
                    _fmt(cfg.N),
                    _fmt(r),
                    _fmt(db),
                    _fmt(est.trials),
                    _fmt(est.outages),
                    _fmt(est.p_hat),
                    _fmt(est.ci95[0]),
                    _fmt(est.ci95[1]),
                ]
            )
    _write_csv(out, SWEEP_COLUMNS, rows)
    LOGGER.info("wrote %d sweep rows to %s", len(rows), out)
    return EXIT_OK


def _read_sweep_csv(path: Path) -> dict:
    """Sweep rows grouped by (regime, K, N, r), each a list of OutageEstimate."""
    groups: dict = {}
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.DictReader(fh)
        have = set(reader.fieldnames or ())
        missing = [c for c in SWEEP_COLUMNS if c not in have]
        if missing:
            raise ConfigError(f"{path}: missing columns {missing}")
        for lineno, row in enumerate(reader, 2):
            try:
                regime = row["regime"]
                K = int(row["K"])
                N = int(row["N"])
                r = float(row["r"])
                db = float(row["snr_db"])
                trials = int(row["trials"])
                outages = int(row["outages"])
                p_hat = float(row["p_hat"])
            except (TypeError, ValueError):
                raise ConfigError(f"{path}:{lineno}: malformed sweep row") from None
            est = OutageEstimate(
                P=10.0 ** (db / 10.0),
                r=r,
                trials=trials,
                outages=outages,
                p_hat=p_hat,
                ci95=(0.0, 0.0),
            )
            groups.setdefault((regime, K, N, r), []).append(est)
    if not groups:
        raise ConfigError(f"{path}: no sweep rows")
    return groups


def cmd_diversity_fit(estimates_path: Path, out: Path) -> int:
    """Fit diversity orders from a sweep CSV and tabulate them against theory."""
    groups = _read_sweep_csv(estimates_path)
    rows = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], k[3])):
        regime, K, N, r = key
        try:
            fit = fit_diversity_slope(groups[key])
        except ValueError as exc:
            raise ConfigError(
                f"group regime={regime} K={K} N={N} r={r}: {exc}"
            ) from None
        d_theory = dmt_theorem1(K, N, r) if regime == REGIME_NO_INTERFERENCE else None
        d_lower = (
            dmt_theorem2_lower(K, N, r)
            if regime == REGIME_INTERFERENCE and K >= 2
            else None
        )
        rows.append(
            [
                regime,
                _fmt(K),
                _fmt(N),
                _fmt(r),
                _fmt(fit.slope),
                _fmt(fit.stderr),
                _fmt(d_theory),
                _fmt(d_lower),
            ]
        )
    _write_csv(out, FIT_COLUMNS, rows)
    LOGGER.info("wrote %d fit rows to %s", len(rows), out)
    return EXIT_OK


def _format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}i"


def _dump_matrices(path: Path, ec) -> None:
    lines = []
    for name, mat in (("F", ec.F), ("H_T", ec.H_T), ("P_N", ec.P_N)):
        lines.append(f"# {name} {mat.shape[0]} {mat.shape[1]}")
        for row in mat:
            lines.append(" ".join(_format_complex(z) for z in row))
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class _BoundsStats:
    realizations: int = 0
    max_entry: float = 0.0
    max_feig_ratio: float = 0.0
    conditioned: int = 0
    max_cov_ratio: float = 0.0
    min_cov_eig: float = np.inf
    violations: int = 0


def _interference_realization(seed: int, K: int, N: int, trial: int, P: float):
    key = stream_key(seed, 901, K, N)
    imask = interference_mask(K, REGIME_INTERFERENCE)
    re = sample_realization(key, trial, K, imask)
    gains = amplification_gains(re, P, REGIME_INTERFERENCE)
    return re, gains


def _simulator_vs_matrix(
    seed: int, tprime: int, combos, per_combo: int, inject_fault: bool = False
) -> float:
    """Max relative gap between the slot simulator and the matrix model."""
    worst = 0.0
    for K, N in combos:
        for t in range(per_combo):
            re, gains = _interference_realization(seed, K, N, t, P=100.0)
            ec = build_equivalent_channel(re, gains, K, N)
            rng = np.random.default_rng(
                np.random.SeedSequence([seed, 902, K, N, t])
            )
            shape = (N * K, tprime)
            x, relay_noise, rx_noise = (
                (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
                / np.sqrt(2.0)
                for _ in range(3)
            )
            y_sim = simulate_signal_level(
                re, gains, K, N, tprime, x, relay_noise, rx_noise
            )
            y_mat = apply_equivalent_channel(ec, x, relay_noise, rx_noise)
            if inject_fault:
                y_mat = y_mat + 1e-3
            gap = np.linalg.norm(y_sim - y_mat) / max(np.linalg.norm(y_sim), 1e-30)
            worst = max(worst, float(gap))
    return worst


def _propagation_bounds(seed: int, combos, per_combo: int) -> _BoundsStats:
    """Entry and spectral bounds of the propagation matrix and noise covariance."""
    stats = _BoundsStats()
    tol = 1e-12
    for K, N in combos:
        NK = N * K
        for t in range(per_combo):
            P = (10.0, 1e4)[t % 2]
            re, gains = _interference_realization(seed, K, N, t, P)
            ec = build_equivalent_channel(re, gains, K, N)
            stats.realizations += 1
            entry = float(np.max(np.abs(ec.F)))
            stats.max_entry = max(stats.max_entry, entry)
            feig = float(np.linalg.eigvalsh(ec.F @ ec.F.conj().T)[-1])
            ratio = feig / (NK * NK)
            stats.max_feig_ratio = max(stats.max_feig_ratio, ratio)
            cov_eigs = np.linalg.eigvalsh(ec.P_N)
            stats.min_cov_eig = min(stats.min_cov_eig, float(cov_eigs[0].real))
            bad = entry > 1.0 + tol or ratio > 1.0 + tol or cov_eigs[0] < 1.0 - tol
            if np.max(np.abs(re.g)) <= 1.0:
                stats.conditioned += 1
                cov_ratio = float(cov_eigs[-1].real) / (NK * NK + 1.0)
                stats.max_cov_ratio = max(stats.max_cov_ratio, cov_ratio)
                bad = bad or cov_ratio > 1.0 + tol
            if bad:
                stats.violations += 1
    return stats


def _schedule_mismatches() -> int:
    """Structural slot-role checks over a small (K, N) grid."""
    bad = 0
    for K in (1, 2, 3, 4):
        for N in (2, 3):
            sched = build_schedule(K, N, LAYOUT_NO_INTERFERENCE)
            rx = [s.rx_relay for s in sched.slots]
            if sum(x is not None for x in rx) != N * K - 1:
                bad += 1
            if rx.count(K) != N - 1 or any(rx.count(k) != N for k in range(1, K)):
                bad += 1
            if [s.fw_relay for s in sched.slots][1:] != rx[:-1]:
                bad += 1
            if sum(s.tx_active for s in sched.slots) != N * K - 1:
                bad += 1
            if K >= 2:
                gen = build_schedule(K, N, LAYOUT_GENERAL)
                rx = [s.rx_relay for s in gen.slots]
                if any(rx.count(k) != N for k in range(1, K + 1)):
                    bad += 1
                if [s.fw_relay for s in gen.slots][1:] != rx[:-1]:
                    bad += 1
                if sum(s.tx_active for s in gen.slots) != N * K:
                    bad += 1
    return bad


def cmd_verify(
    cfg: SchemeConfig,
    dump_path: Optional[Path] = None,
    inject_fault: bool = False,
) -> int:
    """Run the oracle suites and report one PASS/FAIL line per check."""
    failures = 0

    def record(name: str, ok: bool, detail: str) -> None:
        nonlocal failures
        if not ok:
            failures += 1
        print(f"{name:<40s} {'PASS' if ok else 'FAIL'}  ({detail})")

    started = time.monotonic()
    max_dev = 0.0
    for K in range(1, 5):
        for N in range(2, 7):
            for i in range(101):
                r = i / 100
                max_dev = max(max_dev, abs(dmt_theorem1(K, N, r) - lp_vertex_min(K, N, r)))
    record(
        "closed form vs vertex program",
        max_dev <= 1e-9,
        f"max dev {max_dev:.3g}, {time.monotonic() - started:.1f}s",
    )

    try:
        for K in (1, 2, 3):
            for N in (2, 4):
                for i in range(11):
                    lp_oracle_ni(K, N, i / 10, grid_step=0.01)
        record("vertex program vs dense grid", True, "within K*grid_step")
    except RuntimeError as exc:
        record("vertex program vs dense grid", False, str(exc))

    rel = _simulator_vs_matrix(
        cfg.seed,
        cfg.tprime,
        combos=((2, 1), (2, 2), (3, 2), (2, 3)),
        per_combo=25,
        inject_fault=inject_fault,
    )
    record("slot simulator vs matrix model", rel <= 1e-9, f"max rel err {rel:.3g}")

    stats = _propagation_bounds(
        cfg.seed, combos=((2, 1), (3, 2), (4, 3)), per_combo=400
    )
    record(
        "propagation and covariance bounds",
        stats.violations == 0,
        f"{stats.realizations} realizations, max|F| {stats.max_entry:.6f}, "
        f"max eig ratio {stats.max_feig_ratio:.3g}, "
        f"{stats.conditioned} conditioned, max cov ratio {stats.max_cov_ratio:.3g}",
    )

    mismatches = _schedule_mismatches()
    record("schedule slot roles", mismatches == 0, f"{mismatches} mismatches")

    if dump_path is not None:
        # Interference needs a pair, so a one-relay config dumps the smallest
        # interfering shape instead.
        K_dump = cfg.K if cfg.K >= 2 else 2
        re, gains = _interference_realization(cfg.seed, K_dump, cfg.N, 0, P=100.0)
        ec = build_equivalent_channel(re, gains, K_dump, cfg.N)
        _dump_matrices(dump_path, ec)
        print(f"matrix dump written to {dump_path}")

    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAILED


def cmd_hamiltonian(cfg: SchemeConfig, out: Optional[Path]) -> int:
    """Find a cyclic relay order whose consecutive pairs never interfere."""
    graph = InterferenceGraph.from_pairs(cfg.K, cfg.interference_edges)
    order = hamiltonian_relay_order(graph)
    if order is not None and not cycle_is_non_interfering(order, graph):
        raise AssertionError("search returned an interfering cycle")
    text = " ".join(str(v) for v in order) if order else "none"
    print(text)
    if out is not None:
        Path(out).write_text(text + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smrelay",
        description="Outage and diversity-multiplexing analysis of a K-relay "
        "switching amplify-and-forward scheme.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, out_required=False):
        sp.add_argument("--config", type=Path, default=None, help="key = value config file")
        sp.add_argument("--seed", type=int, default=None, help="override the master seed")
        if out_required:
            sp.add_argument("--out", type=Path, required=True, help="output path")
        else:
            sp.add_argument("--out", type=Path, default=None, help="output path")

    sp = sub.add_parser("dmt-theory", help="closed-form curves and the program oracle to CSV")
    common(sp, out_required=True)

    sp = sub.add_parser("outage-sweep", help="Monte Carlo outage sweep to CSV")
    common(sp, out_required=True)
    sp.add_argument("--trials", type=int, default=None, help="override trials per point")
    sp.add_argument("--workers", type=int, default=1, help="worker threads (default 1)")

    sp = sub.add_parser("diversity-fit", help="fit diversity orders from a sweep CSV")
    sp.add_argument("estimates", type=Path, help="outage-sweep CSV to fit")
    sp.add_argument("--out", type=Path, required=True, help="output path")

    sp = sub.add_parser("verify", help="run the self-check oracle suites")
    sp.add_argument("--config", type=Path, default=None, help="key = value config file")
    sp.add_argument("--seed", type=int, default=None, help="override the master seed")
    sp.add_argument(
        "--dump-matrices",
        type=Path,
        default=None,
        metavar="PATH",
        help="write one realization's F/H_T/P_N as text",
    )
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    sp = sub.add_parser("hamiltonian", help="interference-free cyclic relay order")
    common(sp)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        if args.command == "dmt-theory":
            cfg = load_config(args.config, seed=args.seed)
            return cmd_dmt_theory(cfg, args.out)
        if args.command == "outage-sweep":
            cfg = load_config(args.config, seed=args.seed, trials=args.trials)
            if args.workers < 1:
                raise ConfigError(f"workers must be >= 1, got {args.workers}")
            return cmd_outage_sweep(cfg, args.out, workers=args.workers)
        if args.command == "diversity-fit":
            return cmd_diversity_fit(args.estimates, args.out)
        if args.command == "verify":
            cfg = load_config(args.config, seed=args.seed)
            return cmd_verify(cfg, args.dump_matrices, args.inject_fault)
        if args.command == "hamiltonian":
            cfg = load_config(args.config, seed=args.seed)
            return cmd_hamiltonian(cfg, args.out)
        raise AssertionError(f"unhandled command {args.command!r}")
    except (ConfigError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
