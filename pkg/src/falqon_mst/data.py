"""CSV dataset loading, cleaning, and reproducible 8-sample subset draws.

Datasets are plain comma-separated files (header optional, auto-detected by
whether any first-row cell parses as a number).  Rows containing the missing
marker are dropped and counted.  Labels are remapped to contiguous 0-based
ids, either through an explicit mapping (e.g. collapsing heart-disease
severities 1-4 into "present") or by sorted order of the distinct raw
values.

A manifest file describes the expected corpora (filename, label column, raw
row/feature counts); loaders validate against it so a truncated or
mis-delimited download fails fast.  All randomness flows through the
SplitMix64 generator in prng.py, making subsets reproducible across runs,
processes, and reimplementations.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .graph import Sample
from .prng import SplitMix64

DATA_DIR_ENV = "FALQON_MST_DATA"
DEFAULT_MISSING_MARKER = "?"


@dataclass(frozen=True)
class Dataset:
    name: str
    samples: tuple[Sample, ...]
    class_count: int
    dropped_rows: int = 0

    def __post_init__(self):
        if not self.samples:
            raise ValueError("dataset has no usable rows")
        dim = len(self.samples[0].features)
        if any(len(s.features) != dim for s in self.samples):
            raise ValueError("inconsistent feature dimension")
        labels = {s.label for s in self.samples}
        if labels != set(range(self.class_count)):
            raise ValueError("labels must be contiguous 0-based ids")

    @property
    def feature_dim(self) -> int:
        return len(self.samples[0].features)

    def __len__(self) -> int:
        return len(self.samples)

    def class_counts(self) -> list[int]:
        counts = [0] * self.class_count
        for s in self.samples:
            counts[s.label] += 1
        return counts


@dataclass(frozen=True)
class SubsetSpec:
    """A seeded 4-train / 4-test draw."""

    seed: int
    train_size: int = 4
    test_size: int = 4


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(
    path: str | Path,
    label_column: int | str,
    missing_marker: str = DEFAULT_MISSING_MARKER,
    label_map: dict[str, int] | None = None,
    name: str | None = None,
    expected_rows: int | None = None,
    expected_features: int | None = None,
) -> Dataset:
    """Parse a delimited dataset into validated Samples.

    label_column may be a 0-based index or, when the file has a header, a
    column name.  expected_rows counts raw data rows before cleaning.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ValueError(f"{path}: empty file")

    has_header = not any(_is_number(cell.strip()) for cell in rows[0])
    header = [cell.strip() for cell in rows[0]] if has_header else None
    data_rows = rows[1:] if has_header else rows

    if isinstance(label_column, str):
        if header is None:
            raise ValueError("label column given by name but the file has no header")
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise ValueError(f"label column {label_column!r} not in header {header}") from None
    else:
        label_idx = label_column

    if expected_rows is not None and len(data_rows) != expected_rows:
        raise ValueError(f"{path}: {len(data_rows)} data rows, manifest expects {expected_rows}")

    raw_labels: list[str] = []
    features: list[tuple[float, ...]] = []
    kept_rows: list[int] = []
    dropped = 0
    for row_index, row in enumerate(data_rows):
        cells = [c.strip() for c in row]
        idx = label_idx if label_idx >= 0 else len(cells) + label_idx
        if not 0 <= idx < len(cells):
            raise ValueError(f"{path}: row {row_index} has no column {label_column}")
        if any(c == missing_marker for c in cells):
            dropped += 1
            continue
        feat = []
        for col, cell in enumerate(cells):
            if col == idx:
                continue
            try:
                value = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: non-numeric feature {cell!r} at row {row_index}, column {col}"
                ) from None
            if not math.isfinite(value):
                raise ValueError(f"{path}: non-finite feature at row {row_index}, column {col}")
            feat.append(value)
        features.append(tuple(feat))
        raw_labels.append(cells[idx])
        kept_rows.append(row_index)

    if not features:
        raise ValueError(f"{path}: no rows left after dropping missing values")
    dim = len(features[0])
    if any(len(f) != dim for f in features):
        raise ValueError(f"{path}: rows have differing feature counts")
    if expected_features is not None and dim != expected_features:
        raise ValueError(f"{path}: {dim} features, manifest expects {expected_features}")

    if label_map is not None:
        try:
            ids = [label_map[raw] for raw in raw_labels]
        except KeyError as exc:
            raise ValueError(f"{path}: label {exc.args[0]!r} missing from label map") from None
    else:
        distinct = sorted(set(raw_labels))
        mapping = {raw: i for i, raw in enumerate(distinct)}
        ids = [mapping[raw] for raw in raw_labels]
    class_count = max(ids) + 1

    samples = tuple(
        Sample(features=f, label=label, source_index=src)
        for f, label, src in zip(features, ids, kept_rows)
    )
    return Dataset(
        name=name or path.stem,
        samples=samples,
        class_count=class_count,
        dropped_rows=dropped,
    )


def _largest_remainder_allocation(
    counts: Sequence[int], slots: int, rng: SplitMix64
) -> list[int]:
    """Apportion slots proportionally to counts; floor first, then hand the
    leftover slots to the largest remainders, seeded order breaking ties."""
    total = sum(counts)
    quotas = [slots * c / total for c in counts]
    alloc = [math.floor(q) for q in quotas]
    leftover = slots - sum(alloc)
    tie_rank = list(range(len(counts)))
    rng.shuffle(tie_rank)
    order = sorted(range(len(counts)), key=lambda c: (-(quotas[c] - alloc[c]), tie_rank.index(c)))
    for c in order[:leftover]:
        alloc[c] += 1
    return alloc


def sample_subset(dataset: Dataset, spec: SubsetSpec) -> tuple[list[Sample], list[Sample]]:
    """Class-stratified, disjoint train/test draw, deterministic in the seed.

    Train and test each get a largest-remainder allocation over the class
    proportions; members come from a single seeded shuffle per class (train
    takes the front, test the following ones), so the two sides never share
    a source row.  Allocations a class cannot fill spill to the classes with
    the most spare rows.
    """
    stotal = spec.train_size + spec.test_size
    if len(dataset) < stotal:
        raise ValueError(f"dataset has {len(dataset)} rows; need at least {stotal}")
    rng = SplitMix64(spec.seed)
    counts = dataset.class_counts()
    train_alloc = _largest_remainder_allocation(counts, spec.train_size, rng)
    test_alloc = _largest_remainder_allocation(counts, spec.test_size, rng)

    # A tiny class may not cover its allocation; move the excess elsewhere.
    def _rebalance(allocs: list[list[int]]) -> None:
        for _ in range(stotal):
            used = [allocs[0][c] + allocs[1][c] for c in range(len(counts))]
            over = [(used[c] - counts[c], c) for c in range(len(counts)) if used[c] > counts[c]]
            if not over:
                return
            _, worst = max(over)
            which = 1 if allocs[1][worst] > 0 else 0
            allocs[which][worst] -= 1
            spare = [(counts[c] - used[c], c) for c in range(len(counts)) if counts[c] > used[c]]
            spare_best = max(spare)[1]
            allocs[which][spare_best] += 1

    _rebalance([train_alloc, test_alloc])

    by_class: list[list[int]] = [[] for _ in range(dataset.class_count)]
    for pos, s in enumerate(dataset.samples):
        by_class[s.label].append(pos)
    train: list[Sample] = []
    test: list[Sample] = []
    for c in range(dataset.class_count):
        pool = list(by_class[c])
        rng.shuffle(pool)
        k_train, k_test = train_alloc[c], test_alloc[c]
        train.extend(dataset.samples[i] for i in pool[:k_train])
        test.extend(dataset.samples[i] for i in pool[k_train : k_train + k_test])
    return train, test


def draw_samples(dataset: Dataset, k: int, seed: int) -> list[Sample]:
    """k distinct rows drawn uniformly (the ground-state experiment protocol)."""
    rng = SplitMix64(seed)
    return [dataset.samples[i] for i in rng.sample_indices(len(dataset), k)]


# --- manifest-driven loading -------------------------------------------------

def data_directory(override: str | Path | None = None) -> Path:
    """Dataset directory: explicit override, else $FALQON_MST_DATA, else ./data."""
    if override is not None:
        return Path(override)
    env = os.environ.get(DATA_DIR_ENV)
    return Path(env) if env else Path("data")


def load_manifest(data_dir: str | Path) -> dict[str, dict]:
    path = Path(data_dir) / "manifest.json"
    if not path.is_file():
        raise FileNotFoundError(f"dataset manifest not found: {path}")
    with open(path) as fh:
        manifest = json.load(fh)
    return {entry["name"]: entry for entry in manifest["datasets"]}


def available_datasets(data_dir: str | Path | None = None) -> list[str]:
    directory = data_directory(data_dir)
    manifest = load_manifest(directory)
    return sorted(
        name for name, entry in manifest.items() if (directory / entry["filename"]).is_file()
    )


def load_dataset(name: str, data_dir: str | Path | None = None) -> Dataset:
    """Load a manifest-listed dataset by name, validating its shape."""
    directory = data_directory(data_dir)
    manifest = load_manifest(directory)
    if name not in manifest:
        raise KeyError(f"dataset {name!r} not in manifest (have: {sorted(manifest)})")
    entry = manifest[name]
    path = directory / entry["filename"]
    if not path.is_file():
        raise FileNotFoundError(
            f"dataset file {path} is missing; fetch it first (see scripts/fetch_datasets.py)"
        )
    label_map = entry.get("label_map")
    if label_map is not None:
        label_map = {str(k): int(v) for k, v in label_map.items()}
    return load_csv(
        path,
        label_column=entry["label_column"],
        missing_marker=entry.get("missing_marker", DEFAULT_MISSING_MARKER),
        label_map=label_map,
        name=name,
        expected_rows=entry.get("expected_rows"),
        expected_features=entry.get("expected_features"),
    )
