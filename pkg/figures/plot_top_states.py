#!/usr/bin/env python3
"""Render the top-state probability bars from a result.json.

Usage: plot_top_states.py <result.json> <out.png>
"""

import argparse

from mst_figures import plot_top_states


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("result_json")
    parser.add_argument("out_image")
    args = parser.parse_args()
    result = plot_top_states(args.result_json, args.out_image)
    best, prob = result.top_states[0]
    print(f"{args.out_image}: top state {best} (p={prob:.4f}), success={result.success}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
