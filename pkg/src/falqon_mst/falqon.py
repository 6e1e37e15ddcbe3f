"""Feedback-based layered minimization of a diagonal Hamiltonian.

Each layer applies the problem propagator exp(-i*H_p*dt) followed by the
driver propagator exp(-i*beta_k*H_d*dt); the next control value is the
negated commutator expectation measured after the layer,
beta_{k+1} = -<i[H_d, H_p]>, with beta_1 given by the configuration
(default 0).  For sufficiently small dt this feedback law drives the energy
down monotonically; at the reported step of 0.01 the decrease is empirical,
not guaranteed, so traces are recorded in full.

Because the diagonal is materialized, the exact ground energy and the exact
probability mass on minimum-energy states are available without sampling.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import _kernels
from .statevector import (
    DEFAULT_QUBIT_CEILING,
    DiagonalOperator,
    DriverSpec,
    StateVector,
    apply_driver_rotation,
    apply_phases,
    bitstring_to_index,
    commutator_expectation,
    energy,
    init_plus_state,
    phase_vector,
    top_k_probabilities,
)

GROUND_ENERGY_ATOL = 1e-9

TRACE_HEADER = ["layer", "beta", "energy"]


@dataclass(frozen=True)
class FalqonConfig:
    """Knobs of the layered evolution.

    backend selects the inner loop: "numba" (fused kernels), "numpy"
    (reference operations), or "auto" (numba when available).  Both produce
    the same physics; a given backend is deterministic.
    """

    dt: float = 0.01
    layers: int = 10_000
    beta_init: float = 0.0
    driver: DriverSpec | None = None
    top_k: int = 10
    enforce_dt_bound: bool = False
    min_delta: float | None = None
    backend: str = "auto"

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.backend not in ("auto", "numpy", "numba"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass(frozen=True)
class TraceRecord:
    layer: int
    beta: float
    energy: float


@dataclass(frozen=True)
class FalqonTrace:
    """Per-layer (k, beta_k, energy_k) records, k counting from 1."""

    records: tuple[TraceRecord, ...]

    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records])

    def betas(self) -> np.ndarray:
        return np.array([r.beta for r in self.records])

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_HEADER)
            for r in self.records:
                writer.writerow([r.layer, repr(r.beta), repr(r.energy)])


@dataclass(frozen=True)
class FalqonResult:
    trace: FalqonTrace
    top_states: tuple[tuple[str, float], ...]
    final_energy: float
    ground_energy: float
    ground_probability: float
    success: bool
    in_top_k: bool

    def result_dict(self) -> dict:
        """The fixed export schema consumed by the plotting component."""
        return {
            "top_states": [
                {"bitstring": b, "probability": p} for b, p in self.top_states
            ],
            "final_energy": self.final_energy,
            "ground_energy": self.ground_energy,
            "ground_probability": self.ground_probability,
            "success": self.success,
            "in_top_k": self.in_top_k,
        }

    def write_json(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.result_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def dt_bound(diag: DiagonalOperator, driver: DriverSpec) -> float:
    """Sufficient step bound 1 / (4 * max|H_p| * |H_d|^2) for monotone descent.

    Spectral norms: max |diagonal entry| for the problem term, the number of
    driver qubits for the X-term driver.
    """
    hp = float(np.abs(diag.values).max())
    hd = len(driver.qubits)
    if hp == 0.0 or hd == 0:
        return math.inf
    return 1.0 / (4.0 * hp * hd * hd)


def _resolve_backend(name: str) -> str:
    if name == "auto":
        return "numba" if _kernels.HAS_NUMBA else "numpy"
    if name == "numba" and not _kernels.HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return name


def run_falqon(
    diag: DiagonalOperator,
    decode_fn: Callable[[int], bool],
    config: FalqonConfig,
    initial_state: StateVector | None = None,
    ceiling: int = DEFAULT_QUBIT_CEILING,
) -> FalqonResult:
    """Run the layered feedback loop and summarize the final state.

    decode_fn maps a basis index to True iff it encodes a violation-free
    spanning tree; success means the most probable final state is such an
    encoding at the exact ground energy.
    """
    m = diag.m
    if m > ceiling:
        raise ValueError(f"{m} qubits exceed the ceiling {ceiling}")
    driver = config.driver if config.driver is not None else DriverSpec.all_qubits(m)
    driver.validate(m)
    if config.enforce_dt_bound:
        bound = dt_bound(diag, driver)
        if config.dt > bound:
            raise ValueError(f"dt={config.dt:g} exceeds the monotonicity bound {bound:g}")

    state = initial_state.copy() if initial_state is not None else init_plus_state(m, ceiling)
    if state.m != m:
        raise ValueError("initial state dimension does not match the diagonal")
    backend = _resolve_backend(config.backend)

    phases = phase_vector(diag, config.dt)
    qubit_arr = np.asarray(driver.qubits, dtype=np.int64)
    amp = state.amplitudes
    beta = float(config.beta_init)
    records: list[TraceRecord] = []
    prev_energy: float | None = None

    for k in range(1, config.layers + 1):
        if backend == "numba":
            _kernels.apply_phases_inplace(amp, phases)
            theta = beta * config.dt
            _kernels.rotate_x_qubits(amp, qubit_arr, math.cos(theta), math.sin(theta))
            e_k, a_k = _kernels.energy_and_commutator(amp, diag.values, qubit_arr)
        else:
            apply_phases(state, phases)
            apply_driver_rotation(state, driver, beta, config.dt)
            e_k = energy(state, diag)
            a_k = commutator_expectation(state, diag, driver)
        if not math.isfinite(e_k):
            raise FloatingPointError(f"non-finite energy at layer {k}; configuration is numerically broken")
        records.append(TraceRecord(layer=k, beta=beta, energy=e_k))
        beta = -a_k
        if (
            config.min_delta is not None
            and prev_energy is not None
            and abs(prev_energy - e_k) < config.min_delta
        ):
            break
        prev_energy = e_k

    ground = diag.min()
    probs = state.probabilities()
    ground_probability = float(probs[diag.values == ground].sum())
    top_states = top_k_probabilities(state, min(config.top_k, 1 << m))

    def is_ground_encoding(bitstring: str) -> bool:
        s = bitstring_to_index(bitstring)
        return abs(float(diag.values[s]) - ground) <= GROUND_ENERGY_ATOL and decode_fn(s)

    success = is_ground_encoding(top_states[0][0])
    in_top_k = success or any(is_ground_encoding(b) for b, _ in top_states[1:])

    return FalqonResult(
        trace=FalqonTrace(records=tuple(records)),
        top_states=tuple(top_states),
        final_energy=records[-1].energy,
        ground_energy=ground,
        ground_probability=ground_probability,
        success=success,
        in_top_k=in_top_k,
    )
