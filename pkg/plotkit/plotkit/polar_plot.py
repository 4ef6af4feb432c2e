"""Polar-axes plot of the phase density Q(theta).

Usage: plotkit-polar polar_t77.csv -o polar.png
"""

from __future__ import annotations

import argparse

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ._io import common_digest, load_header, load_table, save_figure


def render(csv_path: str, out_path: str) -> str:
    table = load_table(csv_path, required=("theta", "value"))
    head = load_header(csv_path)
    digest = common_digest([csv_path])
    theta = np.array(table["theta"])
    vals = np.array(table["value"])
    fig = plt.figure(figsize=(4.6, 4.6))
    ax = fig.add_subplot(projection="polar")
    # close the curve across the 2 pi seam
    ax.plot(np.append(theta, theta[0] + 2 * np.pi), np.append(vals, vals[0]), lw=1.1)
    ax.fill(np.append(theta, theta[0] + 2 * np.pi), np.append(vals, vals[0]), alpha=0.2)
    ax.set_title(rf"$\mathcal{{Q}}(\theta)$  ($\omega t$ = {head.get('t', '?')})",
                 fontsize=10)
    save_figure(fig, out_path, digest)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("-o", "--out", default="polar.png")
    args = ap.parse_args(argv)
    render(args.csv, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
