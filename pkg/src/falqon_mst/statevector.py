"""Exact statevector simulation with matrix-free diagonal and transverse-field propagators.

States live on m qubits as dense complex amplitude vectors of length 2^m.
Basis index s encodes the binary-variable assignment with bit j of s being
variable j (so variable 0 is the least-significant bit).  The problem
Hamiltonian is diagonal in this basis and is stored as a plain vector of its
diagonal; the driver is a sum of Pauli-X terms applied as exact single-qubit
rotations.

All reductions are sequential with a fixed traversal order, so repeated
evaluation is bit-reproducible regardless of how callers parallelize across
independent states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_QUBIT_CEILING = 22


def index_to_bitstring(s: int, m: int) -> str:
    """0/1 text for basis index s; character position j is variable/qubit j."""
    return "".join("1" if (s >> j) & 1 else "0" for j in range(m))


def bitstring_to_index(text: str) -> int:
    """Inverse of index_to_bitstring."""
    if not text or any(c not in "01" for c in text):
        raise ValueError(f"not a 0/1 bitstring: {text!r}")
    return sum(1 << j for j, c in enumerate(text) if c == "1")


@dataclass
class DiagonalOperator:
    """A diagonal Hamiltonian: its 2^m diagonal entries in basis order."""

    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if v.ndim != 1 or v.size == 0 or (v.size & (v.size - 1)) != 0:
            raise ValueError("diagonal length must be a power of two")
        if not np.all(np.isfinite(v)):
            raise ValueError("diagonal entries must be finite")
        self.values = v

    @property
    def m(self) -> int:
        return int(self.values.size.bit_length() - 1)

    def min(self) -> float:
        return float(self.values.min())


@dataclass(frozen=True)
class DriverSpec:
    """Which qubits carry a Pauli-X driver term (default: all of them)."""

    qubits: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("driver qubits must be distinct")
        if any(q < 0 for q in self.qubits):
            raise ValueError("driver qubit indices must be non-negative")

    @staticmethod
    def all_qubits(m: int) -> "DriverSpec":
        return DriverSpec(qubits=tuple(range(m)))

    def validate(self, m: int) -> None:
        if any(q >= m for q in self.qubits):
            raise ValueError(f"driver qubit out of range for m={m}")


@dataclass
class StateVector:
    """Unit-norm complex amplitudes over the 2^m computational basis states."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(np.asarray(self.amplitudes, dtype=np.complex128))
        if a.ndim != 1 or a.size == 0 or (a.size & (a.size - 1)) != 0:
            raise ValueError("amplitude length must be a power of two")
        self.amplitudes = a

    @property
    def m(self) -> int:
        return int(self.amplitudes.size.bit_length() - 1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real**2 + a.imag**2

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())


def init_plus_state(m: int, ceiling: int = DEFAULT_QUBIT_CEILING) -> StateVector:
    """Uniform superposition |+>^m, the conventional start for X drivers."""
    if not 1 <= m <= ceiling:
        raise ValueError(f"qubit count {m} outside [1, {ceiling}]")
    return StateVector(np.full(1 << m, 2.0 ** (-m / 2.0), dtype=np.complex128))


def basis_state(m: int, s: int) -> StateVector:
    amp = np.zeros(1 << m, dtype=np.complex128)
    amp[s] = 1.0
    return StateVector(amp)


def _check_dims(state: StateVector, diag: DiagonalOperator) -> None:
    if state.amplitudes.size != diag.values.size:
        raise ValueError("state and diagonal dimensions differ")


def phase_vector(diag: DiagonalOperator, dt: float) -> np.ndarray:
    """exp(-i * diag * dt), precomputable once per evolution."""
    if not np.isfinite(dt):
        raise ValueError("dt must be finite")
    return np.exp(-1j * dt * diag.values)


def apply_phases(state: StateVector, phases: np.ndarray) -> None:
    state.amplitudes *= phases


def apply_diagonal_phase(state: StateVector, diag: DiagonalOperator, dt: float) -> None:
    """In place: amplitude[s] *= exp(-i * diag[s] * dt).  Norm preserving."""
    _check_dims(state, diag)
    apply_phases(state, phase_vector(diag, dt))


def _qubit_views(arr: np.ndarray, j: int) -> tuple[np.ndarray, np.ndarray]:
    """Views of arr split by the value of bit j of the index."""
    v = arr.reshape(-1, 2, 1 << j)
    return v[:, 0, :], v[:, 1, :]


def apply_driver_rotation(state: StateVector, driver: DriverSpec, beta: float, dt: float) -> None:
    """In place: exp(-i*beta*dt*X_j) on every driver qubit j.

    The single-qubit factors commute, so their product is the exact
    propagator of beta * sum_j X_j over time dt.
    """
    driver.validate(state.m)
    theta = beta * dt
    c = np.cos(theta)
    ms = -1j * np.sin(theta)
    amp = state.amplitudes
    for j in driver.qubits:
        a, b = _qubit_views(amp, j)
        ta = c * a + ms * b
        b *= c
        b += ms * a
        a[:] = ta


def energy(state: StateVector, diag: DiagonalOperator) -> float:
    """<psi| H |psi> for the diagonal Hamiltonian: sum_s |amp[s]|^2 * diag[s]."""
    _check_dims(state, diag)
    return float(np.einsum("i,i->", state.probabilities(), diag.values))


def commutator_expectation(state: StateVector, diag: DiagonalOperator, driver: DriverSpec) -> float:
    """<psi| i[H_d, H_p] |psi> for diagonal H_p and the X-term driver H_d.

    Reduces to
        -2 * sum_j sum_{s: bit j = 0} (diag[s] - diag[s^e_j])
                                      * Im(conj(amp[s^e_j]) * amp[s]),
    which is real by Hermiticity.
    """
    _check_dims(state, diag)
    driver.validate(state.m)
    amp = state.amplitudes
    total = 0.0
    for j in driver.qubits:
        a0, a1 = _qubit_views(amp, j)
        d0, d1 = _qubit_views(diag.values, j)
        im = a1.real * a0.imag - a1.imag * a0.real
        total += float(np.einsum("ij,ij->", d0 - d1, im))
    return -2.0 * total


def top_k_probabilities(state: StateVector, k: int) -> list[tuple[str, float]]:
    """The k most probable basis states, exact probabilities.

    Sorted by probability descending; ties broken by basis index ascending.
    """
    n = state.amplitudes.size
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside [1, {n}]")
    p = state.probabilities()
    # lexsort: last key is primary
    order = np.lexsort((np.arange(n), -p))[:k]
    m = state.m
    return [(index_to_bitstring(int(s), m), float(p[s])) for s in order]
