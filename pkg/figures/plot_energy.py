#!/usr/bin/env python3
"""Render the per-layer energy curve from a trace.csv.

Usage: plot_energy.py <trace.csv> <out.png> [--ground-energy X]
"""

import argparse

from mst_figures import plot_energy


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("trace_csv")
    parser.add_argument("out_image")
    parser.add_argument("--ground-energy", type=float, default=None,
                        help="horizontal reference line")
    args = parser.parse_args()
    trace = plot_energy(args.trace_csv, args.out_image, ground_energy=args.ground_energy)
    print(f"{args.out_image}: {len(trace.layers)} layers, "
          f"final energy {trace.energies[-1]:.6g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
