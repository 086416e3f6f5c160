import pytest
from hypothesis import given, strategies as st

from qll import benchmarks
from qll.circuit import (
    Gate,
    GateKind,
    QuantumCircuit,
    ccx,
    circuits_equal,
    compose,
    controlled_of,
    cx,
    depth,
    drop_control,
    gate_count,
    h,
    insert_qubit,
    inverse,
    measure,
    remove_qubit,
    x,
)
from qll.errors import CircuitError, ControlOverlap, QubitInUse, Unsupported

from conftest import quantum_circuits, reversible_circuits


def test_gate_count_empty():
    assert gate_count(QuantumCircuit(3)) == 0


def test_gate_count_ignores_measurements():
    c = QuantumCircuit(2, [h(0), cx(0, 1), measure(0, 0), measure(1, 1)], num_clbits=2)
    assert gate_count(c) == 2
    assert depth(c) == 2


@pytest.mark.parametrize("name,count", [("1bit_adder", 7), ("rd53", 19)])
def test_gate_count_benchmarks(name, count):
    assert gate_count(benchmarks.load(name)) == count


def test_depth_empty():
    assert depth(QuantumCircuit(2)) == 0


def test_depth_mini_alu():
    assert depth(benchmarks.load("mini_alu")) == 8


def test_depth_layering():
    assert depth(QuantumCircuit(2, [x(0), x(0)])) == 2
    assert depth(QuantumCircuit(2, [x(0), x(1)])) == 1
    # a controlled gate joins the layers of all its qubits
    assert depth(QuantumCircuit(3, [x(0), x(1), x(1), cx(1, 2), x(2)])) == 4


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate(GateKind.CX, (1,), ())
    with pytest.raises(CircuitError):
        Gate(GateKind.X, (1,), (1,))
    with pytest.raises(CircuitError):
        Gate(GateKind.X, (0, 1))
    with pytest.raises(CircuitError):
        Gate(GateKind.MEASURE, (0,))
    with pytest.raises(CircuitError):
        Gate(GateKind.X, (0,), clbit=0)
    with pytest.raises(CircuitError):
        QuantumCircuit(2, [x(2)])
    with pytest.raises(CircuitError):
        QuantumCircuit(2, [measure(0, 0)])


def test_controlled_of_x():
    g = controlled_of(x(0), 3)
    assert g.kind is GateKind.X and g.targets == (0,) and g.controls == (3,)


def test_controlled_of_cx():
    g = controlled_of(cx(0, 1), 3)
    assert g.kind is GateKind.CX and g.controls == (0, 3) and g.targets == (1,)


def test_controlled_of_errors():
    with pytest.raises(Unsupported):
        controlled_of(measure(0, 0), 1)
    with pytest.raises(ControlOverlap):
        controlled_of(cx(0, 1), 1)
    with pytest.raises(ControlOverlap):
        controlled_of(cx(0, 1), 0)


def test_x_family_identity():
    assert controlled_of(x(0), 1) == cx(1, 0)
    assert controlled_of(cx(0, 1), 2) == ccx(0, 2, 1)
    assert hash(controlled_of(x(0), 1)) == hash(cx(1, 0))
    assert x(0) != h(0)


def test_drop_control_downgrades_kind():
    assert drop_control(cx(0, 1), 0).kind is GateKind.X
    assert drop_control(ccx(0, 1, 2), 1).kind is GateKind.CX
    with pytest.raises(CircuitError):
        drop_control(cx(0, 1), 2)


def test_remove_qubit_idle():
    c = QuantumCircuit(3, [cx(0, 1), x(1)])
    r = remove_qubit(c, 2)
    assert r.num_qubits == 2 and r.gates == c.gates


def test_remove_qubit_shifts_indices():
    c = QuantumCircuit(4, [cx(0, 3), x(2)])
    r = remove_qubit(c, 1)
    assert r.gates == (cx(0, 2), x(1))


def test_remove_qubit_in_use():
    with pytest.raises(QubitInUse):
        remove_qubit(QuantumCircuit(3, [x(2)]), 2)


def test_five_gate_key_qubit_removal_restores_layout():
    from qll.core import decrypt, unlock

    original, locked, record = benchmarks.five_gate_lock()
    assert locked.num_qubits == 6
    restored = unlock(locked, record.key)
    assert restored.num_qubits == 5
    assert circuits_equal(restored, original)
    assert decrypt(locked, record.key).num_qubits == 6


def test_circuits_equal_structural():
    c = QuantumCircuit(3, [x(0), x(1)])
    assert circuits_equal(c, c)
    assert not circuits_equal(c, QuantumCircuit(3, [x(1), x(0)]))
    assert not circuits_equal(c, QuantumCircuit(4, [x(0), x(1)]))
    assert not circuits_equal(c, QuantumCircuit(3, [x(0), x(1)], num_clbits=1))


def test_inverse_and_compose():
    c = QuantumCircuit(2, [Gate(GateKind.S, (0,)), Gate(GateKind.T, (1,)), cx(0, 1)])
    inv = inverse(c)
    assert [g.kind for g in inv.gates] == [GateKind.CX, GateKind.TDG, GateKind.SDG]
    assert len(compose(c, inv)) == 6
    with pytest.raises(Unsupported):
        inverse(QuantumCircuit(1, [measure(0, 0)], num_clbits=1))


def test_trailing_measurements():
    c = QuantumCircuit(1, [x(0), measure(0, 0)], num_clbits=1)
    assert c.has_trailing_measurements_only()
    assert not QuantumCircuit(1, [measure(0, 0), x(0)], num_clbits=1).has_trailing_measurements_only()
    assert c.unitary_part().gates == (x(0),)
    assert c.qubit_labels == ["q[0]"]


@given(quantum_circuits())
def test_depth_at_most_gate_count(c):
    assert depth(c) <= gate_count(c)


@given(quantum_circuits(), st.data())
def test_controlled_of_then_drop_is_identity(c, data):
    for g in c.gates:
        free = [q for q in range(c.num_qubits) if q not in g.qubits]
        if not free:
            continue
        q = data.draw(st.sampled_from(free))
        cg = controlled_of(g, q)
        assert cg.kind is g.kind and cg.targets == g.targets and cg.controls[:-1] == g.controls
        back = drop_control(cg, q)
        assert back == g and back.kind is g.kind


@given(reversible_circuits(), st.data())
def test_insert_then_remove_qubit(c, data):
    q = data.draw(st.integers(0, c.num_qubits))
    assert circuits_equal(remove_qubit(insert_qubit(c, q), q), c)


@given(reversible_circuits(max_qubits=3, max_gates=3), reversible_circuits(max_qubits=3, max_gates=3),
       reversible_circuits(max_qubits=3, max_gates=3))
def test_circuits_equal_is_equivalence(a, b, c):
    assert circuits_equal(a, a)
    assert circuits_equal(a, b) == circuits_equal(b, a)
    if circuits_equal(a, b) and circuits_equal(b, c):
        assert circuits_equal(a, c)
