import pytest

from qll.circuit import Gate, GateKind, QuantumCircuit
from qll.decompose import decompose, mcx, needs_borrowed_qubit
from qll.errors import NotExpressible
from qll.sim import unitaries_equal_up_to_phase, unitary_of

NAMED_ARITY = {GateKind.X: 0, GateKind.CX: 1, GateKind.CCX: 2}


def _check(gate, n, free):
    body = decompose(gate, free)
    for g in body:
        assert len(g.controls) <= NAMED_ARITY.get(g.kind, 0)
    assert unitaries_equal_up_to_phase(unitary_of(QuantumCircuit(n, body)), unitary_of(QuantumCircuit(n, [gate])))


@pytest.mark.parametrize("k", range(0, 6))
def test_mcx_exact_with_one_borrowed_qubit(k):
    n = k + 2
    _check(Gate(GateKind.X, (k,), tuple(range(k))), n, [k + 1])


def test_mcx_is_exact_not_just_up_to_phase():
    body = mcx([0, 1, 2], 3, [4])
    assert (abs(unitary_of(QuantumCircuit(5, body)) - unitary_of(QuantumCircuit(5, [Gate(GateKind.X, (3,), (0, 1, 2))]))) < 1e-9).all()


@pytest.mark.parametrize("kind,k", [
    (GateKind.Z, 1), (GateKind.Z, 3), (GateKind.Y, 2), (GateKind.H, 1), (GateKind.H, 3),
    (GateKind.S, 1), (GateKind.SDG, 1),
])
def test_controlled_single_qubit_gates(kind, k):
    _check(Gate(kind, (k,), tuple(range(k))), k + 2, [k + 1])


def test_borrowed_qubit_only_from_three_controls():
    assert not needs_borrowed_qubit(Gate(GateKind.H, (2,), (0, 1)))
    assert needs_borrowed_qubit(Gate(GateKind.X, (3,), (0, 1, 2)))
    with pytest.raises(NotExpressible):
        mcx([0, 1, 2], 3, [])


@pytest.mark.parametrize("gate", [
    Gate(GateKind.T, (1,), (0,)),
    Gate(GateKind.TDG, (1,), (0,)),
    Gate(GateKind.S, (2,), (0, 1)),
])
def test_inexact_cases_refused(gate):
    with pytest.raises(NotExpressible):
        decompose(gate, [3])
