import pytest

from qll import benchmarks
from qll.circuit import GateKind, depth, gate_count
from qll.sim import prepare_basis_input, sample_counts

NAMES = benchmarks.names()


def test_roster():
    assert NAMES == ["mini_alu", "4mod5", "1bit_adder", "4gt11", "4gt13", "rd53", "rd73", "rd84"]


@pytest.mark.parametrize("name", NAMES)
def test_manifest_matches_circuit(name):
    info = benchmarks.info(name)
    c = benchmarks.load(name)
    assert c.name == name
    assert c.num_qubits == info.qubits
    assert gate_count(c) == info.gates == info.reported["gate_count"]
    assert depth(c) == info.depth == info.reported["depth"]
    assert 4 <= c.num_qubits <= 12 and 4 <= gate_count(c) <= 32
    assert {g.kind for g in c.gates} <= {GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MEASURE}
    measured = sorted(g.target for g in c.measurements())
    assert measured == sorted(info.output_qubits)
    assert sorted(info.input_qubits + info.output_qubits) == list(range(c.num_qubits))
    assert len(info.test_vector) == c.num_qubits
    # outputs start as ancillas
    assert all(info.test_vector[c.num_qubits - 1 - q] == "0" for q in info.output_qubits)


@pytest.mark.parametrize("name", NAMES)
def test_benchmarks_are_deterministic(name):
    c = benchmarks.load(name)
    counts = sample_counts(prepare_basis_input(c, benchmarks.info(name).test_input), 50, seed=0)
    assert len(counts.counts) == 1


@pytest.mark.parametrize("name", NAMES)
def test_every_gate_matters(name):
    c = benchmarks.load(name)
    info = benchmarks.info(name)
    body = [g for g in c.gates if g.kind is not GateKind.MEASURE]

    def table(gates):
        circ = c.with_gates(gates + c.measurements())
        return [sample_counts(prepare_basis_input(circ, v, qubits=info.input_qubits), 1, seed=0).argmax()
                for v in range(2 ** len(info.input_qubits))]

    full = table(body)
    for i in range(len(body)):
        assert table(body[:i] + body[i + 1:]) != full, i


def test_fixtures():
    assert benchmarks.fixture("five_gate")["key"] == "100101"
    original, locked, record = benchmarks.alu_sweep_lock()
    assert str(record.key) == "000"
    assert locked.num_qubits == original.num_qubits + 1
    with pytest.raises(KeyError):
        benchmarks.info("nope")
