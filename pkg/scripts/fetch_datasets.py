#!/usr/bin/env python3
"""Download the benchmark datasets listed in data/manifest.json from the UCI
Machine Learning Repository and write them in the layout the loaders expect.

Usage:  python scripts/fetch_datasets.py [data_dir]

Needs network access; the iris file ships with the repository already.  The
heart-disease label column is normalized to integer strings so the manifest
label map applies regardless of how the upstream file formats numbers.
"""

import json
import sys
import urllib.request
from pathlib import Path


def normalize_heart_row(row: list[str]) -> list[str]:
    label = row[-1].strip()
    if label != "?":
        row[-1] = str(int(float(label)))
    return row


def fetch(entry: dict, data_dir: Path) -> None:
    target = data_dir / entry["filename"]
    if target.exists():
        print(f"{target} already present, skipping")
        return
    url = entry["source"]
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as resp:
        text = resp.read().decode("utf-8")
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if entry["name"] == "heart_disease":
        lines = [",".join(normalize_heart_row(line.split(","))) for line in lines]
    target.write_text("\n".join(lines) + "\n")
    print(f"wrote {target} ({len(lines)} rows, manifest expects {entry['expected_rows']})")


def main() -> int:
    data_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    manifest = json.loads((data_dir / "manifest.json").read_text())
    for entry in manifest["datasets"]:
        try:
            fetch(entry, data_dir)
        except Exception as exc:  # noqa: BLE001 - report and continue with the rest
            print(f"FAILED {entry['name']}: {exc}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
