"""Shared fixtures and independent oracles for the test suite.

The dense-matrix quantum oracles here are deliberately built from scratch
(kron products over explicit 2x2 matrices) so they share no code with the
simulator under test.  Bit convention everywhere: bit j of a basis index is
variable/qubit j, so qubit j lives at kron position m-1-j.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from falqon_mst.graph import Sample, WeightedGraph

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"
INSTANCE_DIR = REPO_ROOT / "instances"

_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


def random_weight_matrix(rng: np.random.Generator, n: int, low=0.5, high=10.0) -> np.ndarray:
    """Symmetric positive matrix with pairwise-distinct off-diagonal weights."""
    while True:
        vals = rng.uniform(low, high, size=n * (n - 1) // 2)
        if len(np.unique(vals)) == vals.size:
            break
    w = np.zeros((n, n))
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            w[i, j] = w[j, i] = vals[k]
            k += 1
    return w


def random_graph(rng: np.random.Generator, n: int, classes: int = 2, **kw) -> WeightedGraph:
    labels = tuple(int(rng.integers(0, classes)) for _ in range(n))
    return WeightedGraph(n=n, weights=random_weight_matrix(rng, n, **kw), labels=labels)


def random_samples(rng: np.random.Generator, n: int, dim: int = 3, classes: int = 2) -> list[Sample]:
    return [
        Sample(
            features=tuple(float(x) for x in rng.uniform(-5, 5, size=dim)),
            label=int(rng.integers(0, classes)),
            source_index=i,
        )
        for i in range(n)
    ]


def random_state(rng: np.random.Generator, m: int) -> np.ndarray:
    amp = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    return amp / np.linalg.norm(amp)


# ---- dense quantum oracles ---------------------------------------------------

def kron_chain(mats: list[np.ndarray]) -> np.ndarray:
    out = mats[0]
    for mat in mats[1:]:
        out = np.kron(out, mat)
    return out


def dense_x_on(m: int, j: int) -> np.ndarray:
    """Pauli X acting on qubit j of m (bit j of the basis index)."""
    mats = [_I2] * m
    mats[m - 1 - j] = _X
    return kron_chain(mats)


def dense_driver_hamiltonian(m: int, qubits) -> np.ndarray:
    h = np.zeros((1 << m, 1 << m), dtype=complex)
    for j in qubits:
        h += dense_x_on(m, j)
    return h


def dense_driver_unitary(m: int, qubits, beta: float, dt: float) -> np.ndarray:
    """Product of exact single-qubit rotations exp(-i*beta*dt*X_j)."""
    theta = beta * dt
    rot = np.array(
        [[math.cos(theta), -1j * math.sin(theta)], [-1j * math.sin(theta), math.cos(theta)]],
        dtype=complex,
    )
    mats = [rot if (m - 1 - pos) in set(qubits) else _I2 for pos in range(m)]
    return kron_chain(mats)


def dense_phase_unitary(diag_values: np.ndarray, dt: float) -> np.ndarray:
    return np.diag(np.exp(-1j * dt * diag_values))


def dense_commutator_observable(diag_values: np.ndarray, m: int, qubits) -> np.ndarray:
    hp = np.diag(diag_values.astype(complex))
    hd = dense_driver_hamiltonian(m, qubits)
    return 1j * (hd @ hp - hp @ hd)


def bits_of(s: int, total: int) -> list[int]:
    return [(s >> j) & 1 for j in range(total)]
