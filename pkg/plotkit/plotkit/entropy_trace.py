"""Time traces of scalar measures (entropies, negativity, <sigma_z>, ...).

Usage: plotkit-entropy-trace scan.csv [-o trace.png] [--columns wehrl ...]
"""

from __future__ import annotations

import argparse

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ._io import common_digest, load_table, save_figure

_LABELS = {"wehrl": r"$S_Q$", "wigner_entropy": r"$S_W$", "negativity": r"$\delta_W$",
           "entropy": r"$S$", "sigma_z": r"$\langle\sigma_z\rangle$",
           "variance_min": r"$\min_\theta V_\theta$", "mandel": r"$Q_M$"}


def render(csv_path: str, out_path: str, columns=None) -> str:
    table = load_table(csv_path, required=("t",))
    digest = common_digest([csv_path])
    names = columns or [c for c in table if c != "t"]
    if not names:
        raise ValueError("no value columns to plot")
    missing = [c for c in names if c not in table]
    if missing:
        from ._io import SchemaError
        raise SchemaError(f"columns {missing} not present in {csv_path}")
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for name in names:
        ax.plot(table["t"], table[name], lw=0.9, label=_LABELS.get(name, name))
    ax.set_xlabel(r"$\omega t$")
    ax.set_ylabel("value")
    ax.legend(loc="best", fontsize=9)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    save_figure(fig, out_path, digest)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("-o", "--out", default="trace.png")
    ap.add_argument("--columns", nargs="+", default=None)
    args = ap.parse_args(argv)
    render(args.csv, args.out, args.columns)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
