#!/usr/bin/env python3
"""Render SVG line charts from benchmark curve CSVs or a sweep table.

Usage:
  plot_curves.py curves OUT.svg CURVE.csv [CURVE.csv ...]
      One line per curve file; uses the macro_f1 column when present,
      otherwise the total objective.
  plot_curves.py sweep OUT.svg SWEEP.csv
      Mean lines with +/- std bands for both sweep arms.
"""

import csv
import sys

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def plot_curves(out, paths):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ylabel = "total"
    for path in paths:
        rows = read_csv(path)
        col = "macro_f1" if rows and "macro_f1" in rows[0] else "total"
        ylabel = col
        xs = [int(r["epoch"]) for r in rows]
        ys = [float(r[col]) for r in rows]
        label = path.rsplit("/", 1)[-1].removesuffix(".csv")
        ax.plot(xs, ys, label=label, linewidth=1.2)
    ax.set_xlabel("epoch")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out)


def plot_sweep(out, path):
    rows = read_csv(path)
    xs = [int(r["epoch"]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for arm, color in (("local_heavy", "tab:blue"), ("structural_heavy", "tab:orange")):
        mean = [float(r[f"{arm}_mean"]) for r in rows]
        std = [float(r[f"{arm}_std"]) for r in rows]
        ax.plot(xs, mean, label=arm.replace("_", " "), color=color)
        ax.fill_between(xs, [m - s for m, s in zip(mean, std)],
                        [m + s for m, s in zip(mean, std)], alpha=0.25, color=color)
    ax.set_xlabel("epoch")
    ax.set_ylabel("macro-F1")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out)


def main():
    if len(sys.argv) < 4 or sys.argv[1] not in ("curves", "sweep"):
        print(__doc__, file=sys.stderr)
        return 2
    mode, out = sys.argv[1], sys.argv[2]
    if mode == "curves":
        plot_curves(out, sys.argv[3:])
    else:
        plot_sweep(out, sys.argv[3])
    return 0


if __name__ == "__main__":
    sys.exit(main())
