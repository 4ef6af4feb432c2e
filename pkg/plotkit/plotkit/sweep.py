"""Coupling-sweep curves: time-averaged measures against lambda.

Usage: plotkit-sweep sweep.csv -o sweep.png
"""

from __future__ import annotations

import argparse

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ._io import common_digest, load_table, save_figure


def render(csv_path: str, out_path: str) -> str:
    table = load_table(csv_path, required=("lambda",))
    digest = common_digest([csv_path])
    names = [c for c in table if c != "lambda"]
    if not names:
        raise ValueError("no sweep columns to plot")
    fig, ax = plt.subplots(figsize=(5.6, 3.8))
    for name in names:
        ax.plot(table["lambda"], table[name], marker="o", ms=3.5, lw=1.0,
                label=name.replace("avg_", "time-averaged "))
    ax.set_xlabel(r"$\lambda/\omega$")
    ax.legend(loc="best", fontsize=9)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    save_figure(fig, out_path, digest)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("-o", "--out", default="sweep.png")
    args = ap.parse_args(argv)
    render(args.csv, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
