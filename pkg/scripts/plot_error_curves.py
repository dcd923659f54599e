#!/usr/bin/env python3
"""Plot error-vs-sampling-rate curves from a sweep CSV.

One curve per method: the mean error across the test variants in the file,
against 1/N.  Needs matplotlib.

Example:
    python scripts/plot_error_curves.py /tmp/prnu-exp/sweep.csv --out curves.png
"""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv_path")
    parser.add_argument("--out", default="error_curves.png")
    args = parser.parse_args()

    by_method = defaultdict(lambda: defaultdict(list))
    with open(args.csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            by_method[row["method"]][int(row["rate"])].append(float(row["error_pct"]))

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for method, per_rate in sorted(by_method.items()):
        rates = sorted(per_rate, reverse=True)  # more frames to the right
        means = [sum(per_rate[r]) / len(per_rate[r]) for r in rates]
        ax.plot([1.0 / r for r in rates], means, marker="o", label=method)
    ax.set_xlabel("sampling rate 1/N")
    ax.set_ylabel("mean error (%)")
    ax.set_title("Identification error vs sampling rate")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(args.out)


if __name__ == "__main__":
    main()
