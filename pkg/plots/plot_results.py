"""Render figures from smrelay result CSVs.

Two plot kinds, selected with --kind:

* ``dmt-curves``: diversity d against multiplexing gain r, one line per
  (source, K, N) series from one or more `dmt-theory` CSVs; the cut-set
  upper bound is drawn dashed.
* ``outage-loglog``: -log10(p_hat) against log10(P) from `outage-sweep`
  CSVs, one series per (regime, K, N, r) with its fitted slope in the
  legend.

The tool only reads the CSV files; given identical inputs it writes an
identical image (fixed styling, no timestamps).
"""

import argparse
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXIT_OK = 0
EXIT_BAD_INPUT = 2

DMT_COLUMNS = ("source", "K", "N", "r", "d")
SWEEP_COLUMNS = ("regime", "K", "N", "r", "snr_db", "p_hat")

KIND_DMT = "dmt-curves"
KIND_LOGLOG = "outage-loglog"


class InputError(ValueError):
    """Unreadable, empty, or malformed input CSV."""


def read_rows(paths, required):
    """All data rows of the given CSVs as (path, lineno, dict) triples."""
    rows = []
    for path in paths:
        try:
            fh = open(path, newline="")
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
        with fh:
            reader = csv.DictReader(fh)
            have = set(reader.fieldnames or ())
            missing = [c for c in required if c not in have]
            if missing:
                raise InputError(f"{path}: missing columns {missing}")
            before = len(rows)
            for lineno, row in enumerate(reader, 2):
                rows.append((path, lineno, row))
            if len(rows) == before:
                raise InputError(f"{path}: no data rows")
    return rows


def dmt_series(rows):
    """Curve points keyed by (source, K, N); N is None for the upper bound."""
    series = {}
    for path, lineno, row in rows:
        try:
            key = (
                row["source"],
                int(row["K"]),
                int(row["N"]) if row["N"] else None,
            )
            point = (float(row["r"]), float(row["d"]))
        except (TypeError, ValueError):
            raise InputError(f"{path}:{lineno}: malformed curve row") from None
        series.setdefault(key, set()).add(point)
    order = sorted(series, key=lambda k: (k[0], k[1], k[2] if k[2] is not None else -1))
    return {key: sorted(series[key]) for key in order}


def loglog_series(rows):
    """Per-(regime, K, N, r) points (log10 P, -log10 p_hat) plus fitted slope.

    Series whose every p_hat is zero carry no slope information and are
    dropped with a warning.
    """
    grouped = {}
    for path, lineno, row in rows:
        try:
            key = (row["regime"], int(row["K"]), int(row["N"]), float(row["r"]))
            db = float(row["snr_db"])
            p_hat = float(row["p_hat"])
        except (TypeError, ValueError):
            raise InputError(f"{path}:{lineno}: malformed sweep row") from None
        grouped.setdefault(key, []).append((db / 10.0, p_hat))
    series = {}
    for key in sorted(grouped):
        pts = sorted((x, -np.log10(p)) for x, p in grouped[key] if p > 0.0)
        if not pts:
            regime, K, N, r = key
            print(
                f"warning: skipping regime={regime} K={K} N={N} r={r}: "
                "every p_hat is zero",
                file=sys.stderr,
            )
            continue
        xs = np.array([x for x, _ in pts])
        ys = np.array([y for _, y in pts])
        slope = float(np.polyfit(xs, ys, 1)[0]) if len(set(xs)) >= 2 else float("nan")
        series[key] = (xs, ys, slope)
    return series


def render_dmt_curves(series, ax):
    for (source, K, N), points in series.items():
        xs = [r for r, _ in points]
        ys = [d for _, d in points]
        label = f"{source} K={K}" + (f" N={N}" if N is not None else "")
        style = "--" if source == "upper-bound" else "-"
        ax.plot(xs, ys, style, marker=".", markersize=4, label=label)
    ax.set_xlabel("multiplexing gain r")
    ax.set_ylabel("diversity gain d")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)


def render_outage_loglog(series, ax):
    for (regime, K, N, r), (xs, ys, slope) in series.items():
        label = f"{regime} K={K} N={N} r={r:g} (slope {slope:.2f})"
        ax.plot(xs, ys, "-", marker="o", markersize=4, label=label)
    ax.set_xlabel("log10 P")
    ax.set_ylabel("-log10 outage probability")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot_results", description="Render figures from smrelay result CSVs."
    )
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        metavar="CSV",
        help="input CSV; repeat to overlay several files",
    )
    parser.add_argument("--kind", choices=(KIND_DMT, KIND_LOGLOG), required=True)
    parser.add_argument("--out", type=Path, required=True, help="output image path")
    args = parser.parse_args(argv)

    try:
        if args.kind == KIND_DMT:
            series = dmt_series(read_rows(args.inputs, DMT_COLUMNS))
            if not series:
                raise InputError("no curve series found")
        else:
            series = loglog_series(read_rows(args.inputs, SWEEP_COLUMNS))
            if not series:
                raise InputError("no plottable series (every p_hat is zero)")
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    if args.kind == KIND_DMT:
        render_dmt_curves(series, ax)
    else:
        render_outage_loglog(series, ax)
    fig.tight_layout()
    try:
        fig.savefig(args.out, dpi=120)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    finally:
        plt.close(fig)
    print(f"wrote {args.out} ({len(series)} series)")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
