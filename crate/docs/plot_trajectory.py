#!/usr/bin/env python3
"""Render the per-scale trajectory panels from `mscgr plotdata` output.

Usage:
    mscgr plotdata --sequence ATCGATCGTAGC --out plotdata.json
    python3 docs/plot_trajectory.py plotdata.json [-o trajectories.png]

One panel per scale: the unit-square trajectory with its points joined in
order, the start marked with a circle and the final position with a star.
"""

import argparse
import json
from fractions import Fraction

import matplotlib.pyplot as plt


def exact_points(scale):
    """Decode the lossless num/den strings; falls back to points_float."""
    try:
        return [
            (float(Fraction(x)), float(Fraction(y))) for x, y in scale["points"]
        ]
    except (KeyError, ValueError):
        return [tuple(p) for p in scale["points_float"]]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("plotdata", help="JSON file written by `mscgr plotdata`")
    parser.add_argument("-o", "--out", default="trajectories.png")
    args = parser.parse_args()

    with open(args.plotdata) as fh:
        data = json.load(fh)

    scales = data["scales"]
    fig, axes = plt.subplots(1, len(scales), figsize=(4 * len(scales), 4.2))
    if len(scales) == 1:
        axes = [axes]

    for ax, scale in zip(axes, scales):
        pts = exact_points(scale)
        xs, ys = zip(*pts)
        ax.plot(xs, ys, "-", color="tab:blue", linewidth=0.8, alpha=0.7)
        ax.plot(xs[1:], ys[1:], ".", color="tab:blue", markersize=4)
        ax.plot(xs[0], ys[0], "o", color="tab:green", markersize=8, label="start")
        ax.plot(xs[-1], ys[-1], "*", color="tab:red", markersize=14, label="final")
        ax.set_title(f"k = {scale['scale']}  ({scale['n']} steps)")
        ax.set_xlim(-1.05, 1.05)
        ax.set_ylim(-1.05, 1.05)
        ax.set_aspect("equal")
        ax.legend(loc="lower right", fontsize=8)

    fig.suptitle(f"{data['kind'].upper()} {data['sequence']}")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
