import warnings

import pytest
from hypothesis import strategies as st

from qll.circuit import Gate, GateKind, QuantumCircuit, ccx, cx, x
from qll.core import StructuralLeakageWarning

SINGLE = [GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S, GateKind.T, GateKind.SDG, GateKind.TDG]


@pytest.fixture(autouse=True)
def _quiet_leakage():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StructuralLeakageWarning)
        yield


@st.composite
def reversible_gates(draw, n):
    kind = draw(st.sampled_from(["x", "cx", "ccx"] if n >= 3 else ["x", "cx"] if n >= 2 else ["x"]))
    qs = draw(st.permutations(range(n)))
    if kind == "x":
        return x(qs[0])
    if kind == "cx":
        return cx(qs[0], qs[1])
    return ccx(qs[0], qs[1], qs[2])


@st.composite
def reversible_circuits(draw, min_qubits=2, max_qubits=5, min_gates=1, max_gates=12):
    n = draw(st.integers(min_qubits, max_qubits))
    gates = draw(st.lists(reversible_gates(n), min_size=min_gates, max_size=max_gates))
    return QuantumCircuit(n, gates)


@st.composite
def quantum_gates(draw, n):
    """Any kind with 0-2 controls (x family up to 2 controls)."""
    kinds = SINGLE + [k for k in (GateKind.CX, GateKind.CCX) if k.base_controls < n]
    kind = draw(st.sampled_from(kinds))
    qs = draw(st.permutations(range(n)))
    base = kind.base_controls
    extra = draw(st.integers(0, min(1, n - 1 - base))) if n - 1 - base > 0 else 0
    controls = tuple(qs[1 : 1 + base + extra])
    return Gate(kind, (qs[0],), controls)


@st.composite
def quantum_circuits(draw, min_qubits=3, max_qubits=5, max_gates=10):
    n = draw(st.integers(min_qubits, max_qubits))
    gates = draw(st.lists(quantum_gates(n), min_size=0, max_size=max_gates))
    return QuantumCircuit(n, gates)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    log = request.config.stash.setdefault(_ACCEPTANCE, [])

    class _Verdict:
        def __init__(self):
            self.label = None

        def __call__(self, label):
            self.label = label
            return self

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            line = f"{'PASS' if exc_type is None else 'FAIL'} {self.label}"
            log.append(line)
            print(line)
            return False

    return _Verdict()


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_ACCEPTANCE, [])
    if log:
        terminalreporter.section("acceptance criteria")
        for line in log:
            terminalreporter.write_line(line)
