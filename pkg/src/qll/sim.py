"""
Exact statevector simulation.

Amplitude index ``i`` holds basis state ``|i>`` with qubit 0 as the least
significant bit, so printed outcome strings have qubit (or clbit) 0 on the
right. Gates are applied in place on strided views of the state; no full
matrices are built except by :func:`unitary_of`.

Noise is a trajectory model: after each gate, with probability ``p`` the
acted-on qubits receive a uniformly random Pauli string (identity
included), which averages to the depolarizing channel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Gate, GateKind, QuantumCircuit, x
from .errors import (
    DimensionMismatch,
    MeasureInUnitaryRun,
    SimulationError,
    TooLarge,
    ZeroShots,
)
from .metrics import CountsDistribution

MAX_UNITARY_QUBITS = 10

_S2 = 1 / np.sqrt(2)
_W = np.exp(1j * np.pi / 4)
MATRICES = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, _W]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, np.conj(_W)]], dtype=complex),
}
MATRICES[GateKind.CX] = MATRICES[GateKind.X]
MATRICES[GateKind.CCX] = MATRICES[GateKind.X]
_PAULIS = [np.eye(2, dtype=complex), MATRICES[GateKind.X], MATRICES[GateKind.Y], MATRICES[GateKind.Z]]


@dataclass
class Statevector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** self.num_qubits,):
            raise DimensionMismatch(
                f"{self.num_qubits} qubits need {2 ** self.num_qubits} amplitudes, "
                f"got shape {self.amplitudes.shape}"
            )

    @classmethod
    def zero(cls, num_qubits: int) -> "Statevector":
        return cls.basis(num_qubits, 0)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "Statevector":
        amps = np.zeros(2 ** num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sum(self.probabilities()))

    def copy(self) -> "Statevector":
        return Statevector(self.num_qubits, self.amplitudes.copy())


def _apply_matrix(psi: np.ndarray, n: int, m: np.ndarray, target: int, controls=()) -> None:
    """Apply 2x2 ``m`` to ``target`` on the all-ones subspace of ``controls``, in place.

    ``psi`` is the amplitude vector reshaped to ``[2] * n``; axis ``n-1-q`` is qubit ``q``.
    """
    idx = [slice(None)] * n
    for c in controls:
        idx[n - 1 - c] = 1
    sub = psi[tuple(idx)]
    # integer indices drop axes; find where the target axis landed
    axis = (n - 1 - target) - sum(1 for c in controls if n - 1 - c < n - 1 - target)
    view = np.moveaxis(sub, axis, 0)
    a0 = view[0].copy()
    a1 = view[1].copy()
    view[0] = m[0, 0] * a0 + m[0, 1] * a1
    view[1] = m[1, 0] * a0 + m[1, 1] * a1


def apply_gate(state: Statevector, gate: Gate) -> None:
    if gate.kind is GateKind.MEASURE:
        raise MeasureInUnitaryRun("measurement in a unitary run")
    n = state.num_qubits
    psi = state.amplitudes.reshape([2] * n) if n else state.amplitudes
    _apply_matrix(psi, n, MATRICES[gate.kind], gate.target, gate.controls)


def run_statevector(circuit: QuantumCircuit, initial: Statevector | None = None) -> Statevector:
    """Apply every gate of ``circuit`` in order, starting from ``|0...0>`` by default."""
    if any(g.kind is GateKind.MEASURE for g in circuit.gates):
        raise MeasureInUnitaryRun("circuit contains measurements; use unitary_part()")
    if initial is None:
        state = Statevector.zero(circuit.num_qubits)
    else:
        if initial.num_qubits != circuit.num_qubits:
            raise DimensionMismatch("initial state width differs from circuit width")
        state = initial.copy()
    for g in circuit.gates:
        apply_gate(state, g)
    return state


def unitary_of(circuit: QuantumCircuit) -> np.ndarray:
    """Full unitary, built column by column from basis-state runs."""
    n = circuit.num_qubits
    if n > MAX_UNITARY_QUBITS:
        raise TooLarge(f"{n} qubits exceeds the {MAX_UNITARY_QUBITS}-qubit unitary limit")
    if any(g.kind is GateKind.MEASURE for g in circuit.gates):
        raise MeasureInUnitaryRun("circuit contains measurements")
    dim = 2 ** n
    u = np.empty((dim, dim), dtype=complex)
    for col in range(dim):
        u[:, col] = run_statevector(circuit, Statevector.basis(n, col)).amplitudes
    return u


def unitaries_equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    flat_b = b.ravel()
    if flat_b.size == 0:
        return True
    pivot = 0 if abs(flat_b[0]) > tol else int(np.argmax(np.abs(flat_b)))
    if abs(flat_b[pivot]) <= tol:
        return bool(np.max(np.abs(a)) <= tol)
    c = a.ravel()[pivot] / flat_b[pivot]
    if abs(c) == 0:
        return False
    c /= abs(c)
    return bool(np.max(np.abs(a - c * b)) <= tol)


@dataclass(frozen=True)
class NoiseSpec:
    depolarizing_prob_1q: float = 0.0
    depolarizing_prob_2q: float = 0.0

    def __post_init__(self):
        for p in (self.depolarizing_prob_1q, self.depolarizing_prob_2q):
            if not 0.0 <= p <= 1.0:
                raise SimulationError(f"depolarizing probability {p} outside [0, 1]")

    def prob_for(self, gate: Gate) -> float:
        return self.depolarizing_prob_1q if len(gate.qubits) == 1 else self.depolarizing_prob_2q

    @property
    def is_noiseless(self) -> bool:
        return self.depolarizing_prob_1q == 0 and self.depolarizing_prob_2q == 0


def measurement_map(circuit: QuantumCircuit) -> tuple[list[tuple[int, int]], int]:
    """(qubit, bit) pairs read out at the end, and the outcome width.

    Without measure gates every qubit is read, qubit ``i`` into bit ``i``.
    """
    meas = circuit.measurements()
    if not meas:
        return [(q, q) for q in range(circuit.num_qubits)], circuit.num_qubits
    if not circuit.has_trailing_measurements_only():
        raise SimulationError("mid-circuit measurement is not supported")
    return [(g.target, g.clbit) for g in meas], circuit.num_clbits


def outcome_probabilities(state: Statevector, pairs, width: int) -> np.ndarray:
    """Probability of each classical outcome ``0 .. 2**width - 1``."""
    probs = state.probabilities()
    idx = np.arange(probs.size)
    outcome = np.zeros(probs.size, dtype=np.int64)
    for q, c in pairs:
        bit = (idx >> q) & 1
        # later measurements into the same clbit overwrite earlier ones
        outcome = (outcome & ~(1 << c)) | (bit << c)
    return np.bincount(outcome, weights=probs, minlength=2 ** width)


def _counts_from_array(arr: np.ndarray, width: int) -> CountsDistribution:
    counts = {format(i, f"0{width}b") if width else "": int(v) for i, v in enumerate(arr) if v}
    return CountsDistribution(counts, shots=int(arr.sum()))


def sample_counts(
    circuit: QuantumCircuit,
    shots: int,
    seed: int | np.random.Generator | None = 0,
    noise: NoiseSpec | None = None,
) -> CountsDistribution:
    """Sample measurement outcomes; deterministic for a fixed integer seed."""
    if shots <= 0:
        raise ZeroShots("shots must be positive")
    rng = np.random.default_rng(seed)
    pairs, width = measurement_map(circuit)
    body = circuit.unitary_part()
    ideal = outcome_probabilities(run_statevector(body), pairs, width)
    ideal = ideal / ideal.sum()
    if noise is None or noise.is_noiseless:
        return _counts_from_array(rng.multinomial(shots, ideal), width)

    # shots that see no error event share the ideal distribution
    p_clean = 1.0
    for g in body.gates:
        p_clean *= 1.0 - noise.prob_for(g)
    clean = int(rng.binomial(shots, p_clean))
    totals = rng.multinomial(clean, ideal).astype(np.int64)
    noisy = shots - clean
    done = 0
    while done < noisy:
        # rejection: a trajectory with zero events was already accounted for
        state = Statevector.zero(body.num_qubits)
        hit = False
        nq = body.num_qubits
        for g in body.gates:
            apply_gate(state, g)
            p = noise.prob_for(g)
            if p and rng.random() < p:
                hit = True
                psi = state.amplitudes.reshape([2] * nq)
                for q in g.qubits:
                    _apply_matrix(psi, nq, _PAULIS[rng.integers(4)], q)
        if not hit:
            continue
        probs = outcome_probabilities(state, pairs, width)
        totals[rng.choice(probs.size, p=probs / probs.sum())] += 1
        done += 1
    return _counts_from_array(totals, width)


def prepare_basis_input(circuit: QuantumCircuit, value: int | str, qubits=None) -> QuantumCircuit:
    """Prepend X gates so that ``qubits`` start in basis state ``value``.

    ``value`` is an int or a bitstring with ``qubits[0]`` as its rightmost bit.
    ``qubits`` defaults to all qubits in order.
    """
    qubits = list(range(circuit.num_qubits)) if qubits is None else list(qubits)
    if isinstance(value, str):
        if len(value) != len(qubits) or set(value) - {"0", "1"}:
            raise SimulationError(f"bad input bitstring {value!r} for {len(qubits)} qubits")
        value = int(value, 2)
    if not 0 <= value < 2 ** len(qubits):
        raise SimulationError(f"input {value} does not fit in {len(qubits)} qubits")
    prep = [x(q) for i, q in enumerate(qubits) if (value >> i) & 1]
    return circuit.with_gates(tuple(prep) + circuit.gates)
