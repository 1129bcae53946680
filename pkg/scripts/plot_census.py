#!/usr/bin/env python3
"""Render a census CSV summary as a PNG (batch artifact, no UI).

Usage: python scripts/plot_census.py census.csv census.png
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main(argv):
    if len(argv) != 3:
        print(__doc__, file=sys.stderr)
        return 1
    src, dst = argv[1], argv[2]
    ns, classes, matrices = [], [], []
    with open(src, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            ns.append(int(row["n"]))
            classes.append(int(row["conjugacy_classes"]))
            matrices.append(int(row["distinct_matrices"]))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, classes, "o-", label="conjugacy classes")
    ax.plot(ns, matrices, "s--", label="distinct transition matrices")
    ax.set_xlabel("inner word length n")
    ax.set_ylabel("count")
    ax.set_yscale("log")
    ax.legend()
    ax.set_title("class count vs. stretch-factor data")
    fig.tight_layout()
    fig.savefig(dst, dpi=150)
    print(f"wrote {dst}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
