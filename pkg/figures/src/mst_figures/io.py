"""Strict parsers for the experiment output contracts.

Files whose headers or field names deviate from the fixed formats are
rejected outright rather than guessed at; a renamed column means the
producer changed and the figures would silently lie.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

TRACE_HEADER = ["layer", "beta", "energy"]
RESULT_FIELDS = {"top_states", "final_energy", "ground_energy", "success", "in_top_k"}


@dataclass(frozen=True)
class TraceFile:
    layers: list[int]
    betas: list[float]
    energies: list[float]


@dataclass(frozen=True)
class ResultFile:
    top_states: list[tuple[str, float]]
    final_energy: float
    ground_energy: float
    success: bool
    in_top_k: bool


def read_trace(path: str | Path) -> TraceFile:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty trace file") from None
        if header != TRACE_HEADER:
            raise ValueError(f"{path}: header {header} != {TRACE_HEADER}")
        layers, betas, energies = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            layers.append(int(row[0]))
            betas.append(float(row[1]))
            energies.append(float(row[2]))
    if not layers:
        raise ValueError(f"{path}: trace has no records")
    if any(b >= a for a, b in zip(layers[1:], layers)):
        raise ValueError(f"{path}: layer indices must increase strictly")
    values = betas + energies
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"{path}: non-finite values in trace")
    return TraceFile(layers=layers, betas=betas, energies=energies)


def read_result(path: str | Path) -> ResultFile:
    with open(path) as fh:
        payload = json.load(fh)
    missing = RESULT_FIELDS - set(payload)
    if missing:
        raise ValueError(f"{path}: missing result fields {sorted(missing)}")
    states: list[tuple[str, float]] = []
    for entry in payload["top_states"]:
        if set(entry) != {"bitstring", "probability"}:
            raise ValueError(f"{path}: malformed top_states entry {entry}")
        states.append((str(entry["bitstring"]), float(entry["probability"])))
    if not states:
        raise ValueError(f"{path}: empty top_states")
    probs = [p for _, p in states]
    if any(not 0.0 <= p <= 1.0 for p in probs):
        raise ValueError(f"{path}: probabilities outside [0, 1]")
    if probs != sorted(probs, reverse=True):
        raise ValueError(f"{path}: top_states not sorted by descending probability")
    return ResultFile(
        top_states=states,
        final_energy=float(payload["final_energy"]),
        ground_energy=float(payload["ground_energy"]),
        success=bool(payload["success"]),
        in_top_k=bool(payload["in_top_k"]),
    )
