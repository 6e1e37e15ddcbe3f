"""Fused numba kernels for the inner evolution loop.

Same math as the numpy operations in statevector.py, specialized for the
layered loop: one pass for the diagonal phase, one in-place sweep per driver
qubit for the X rotations, and a fused energy + commutator reduction.  All
loops are sequential with fixed traversal order, so a given build produces
bit-identical trajectories regardless of how many runs execute in parallel.

Import of this module is optional; callers fall back to the numpy path when
numba is unavailable.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap if not (args and callable(args[0])) else args[0]


@njit(cache=True, fastmath=True)
def apply_phases_inplace(amp: np.ndarray, phases: np.ndarray) -> None:
    for i in range(amp.shape[0]):
        amp[i] = amp[i] * phases[i]


@njit(cache=True, fastmath=True)
def rotate_x_qubits(amp: np.ndarray, qubits: np.ndarray, c: float, s: float) -> None:
    js = 1j * s
    n = amp.shape[0]
    for qi in range(qubits.shape[0]):
        stride = 1 << qubits[qi]
        step = stride << 1
        for base in range(0, n, step):
            for r in range(base, base + stride):
                i1 = r + stride
                a = amp[r]
                b = amp[i1]
                amp[r] = c * a - js * b
                amp[i1] = c * b - js * a


@njit(cache=True, fastmath=True)
def energy_and_commutator(amp: np.ndarray, diag: np.ndarray, qubits: np.ndarray):
    n = amp.shape[0]
    e = 0.0
    for i in range(n):
        a = amp[i]
        e += (a.real * a.real + a.imag * a.imag) * diag[i]
    total = 0.0
    for qi in range(qubits.shape[0]):
        stride = 1 << qubits[qi]
        step = stride << 1
        acc = 0.0
        for base in range(0, n, step):
            for r in range(base, base + stride):
                i1 = r + stride
                a = amp[r]
                b = amp[i1]
                acc += (diag[r] - diag[i1]) * (b.real * a.imag - b.imag * a.real)
        total += acc
    return e, -2.0 * total


def warmup() -> None:
    """Trigger JIT compilation on a toy problem (cached across processes)."""
    if not HAS_NUMBA:
        return
    amp = np.array([1.0 + 0j, 0.0j])
    diag = np.array([0.0, 1.0])
    qubits = np.array([0], dtype=np.int64)
    apply_phases_inplace(amp, np.exp(-1j * 0.01 * diag))
    rotate_x_qubits(amp, qubits, 1.0, 0.0)
    energy_and_commutator(amp, diag, qubits)
