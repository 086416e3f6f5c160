"""Quantum logic locking: lock a circuit behind a multi-bit key carried on one qubit."""

from .circuit import (
    Gate,
    GateKind,
    QuantumCircuit,
    circuits_equal,
    controlled_of,
    depth,
    gate_count,
    remove_qubit,
)
from .core import Key, LockRecord, decrypt, encrypt, gen_key, simplify, unlock, verify_roundtrip
from .metrics import CountsDistribution, accuracy, dfc, hvd, tvd
from .qasm import parse_qasm, serialize_qasm
from .sim import NoiseSpec, Statevector, run_statevector, sample_counts, unitary_of

__version__ = "0.1.0"
