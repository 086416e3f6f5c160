"""
Circuit intermediate representation.

A ``QuantumCircuit`` is an immutable, ordered list of ``Gate`` values over a
single quantum register and a single classical register. Gate order is
execution order. Extra controls are stored on the gate itself, so a
key-controlled CX is simply ``Gate(CX, targets=(t,), controls=(c, k))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

from .errors import CircuitError, ControlOverlap, QubitInUse, Unsupported


class GateKind(Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    T = "t"
    SDG = "sdg"
    TDG = "tdg"
    CX = "cx"
    CCX = "ccx"
    MEASURE = "measure"

    @property
    def base_controls(self) -> int:
        return _BASE_CONTROLS.get(self, 0)

    @property
    def is_x_family(self) -> bool:
        return self in (GateKind.X, GateKind.CX, GateKind.CCX)


_BASE_CONTROLS = {GateKind.CX: 1, GateKind.CCX: 2}


@dataclass(frozen=True, eq=False)
class Gate:
    """One operation.

    X, CX and CCX are one family: a gate's identity is its target and
    control tuple, so ``X`` with one extra control equals a plain ``CX`` on
    the same qubits. The stored kind only records how it was written.
    """

    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    clbit: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        if len(self.targets) != 1:
            raise CircuitError(f"{self.kind.value} takes exactly one target, got {self.targets}")
        if len(self.controls) < self.kind.base_controls:
            raise CircuitError(
                f"{self.kind.value} needs at least {self.kind.base_controls} controls, got {self.controls}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit in {self}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self}")
        if self.kind is GateKind.MEASURE:
            if self.controls:
                raise CircuitError("measure cannot be controlled")
            if self.clbit is None or self.clbit < 0:
                raise CircuitError("measure needs a classical bit")
        elif self.clbit is not None:
            raise CircuitError("only measure writes a classical bit")

    def _identity(self):
        kind = GateKind.X if self.kind.is_x_family else self.kind
        return (kind, self.targets, self.controls, self.clbit)

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        return self._identity() == other._identity()

    def __hash__(self):
        return hash(self._identity())

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    @property
    def target(self) -> int:
        return self.targets[0]

    def __str__(self):
        name = self.kind.value
        if self.kind is GateKind.MEASURE:
            return f"measure q{self.target} -> c{self.clbit}"
        extra = len(self.controls) - self.kind.base_controls
        if extra:
            name = f"c{extra}-{name}"
        return f"{name} " + ",".join(f"q{q}" for q in self.qubits)


# Convenience constructors; used heavily in tests and fixtures.
def x(t: int) -> Gate:
    return Gate(GateKind.X, (t,))


def h(t: int) -> Gate:
    return Gate(GateKind.H, (t,))


def cx(c: int, t: int) -> Gate:
    return Gate(GateKind.CX, (t,), (c,))


def ccx(c0: int, c1: int, t: int) -> Gate:
    return Gate(GateKind.CCX, (t,), (c0, c1))


def measure(q: int, c: int) -> Gate:
    return Gate(GateKind.MEASURE, (q,), clbit=c)


@dataclass(frozen=True)
class QuantumCircuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    num_clbits: int = 0
    qreg: str = "q"
    creg: str = "c"
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.num_qubits < 0 or self.num_clbits < 0:
            raise CircuitError("register sizes must be non-negative")
        for g in self.gates:
            if not isinstance(g, Gate):
                raise CircuitError(f"not a Gate: {g!r}")
            if max(g.qubits) >= self.num_qubits:
                raise CircuitError(f"{g} out of range for {self.num_qubits} qubits")
            if g.clbit is not None and g.clbit >= self.num_clbits:
                raise CircuitError(f"{g} out of range for {self.num_clbits} clbits")

    @property
    def qubit_labels(self) -> list[str]:
        return [f"{self.qreg}[{i}]" for i in range(self.num_qubits)]

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def with_gates(self, gates: Iterable[Gate], num_qubits: int | None = None) -> "QuantumCircuit":
        return replace(
            self,
            gates=tuple(gates),
            num_qubits=self.num_qubits if num_qubits is None else num_qubits,
        )

    def unitary_part(self) -> "QuantumCircuit":
        """The circuit without its measurements."""
        return self.with_gates(g for g in self.gates if g.kind is not GateKind.MEASURE)

    def measurements(self) -> list[Gate]:
        return [g for g in self.gates if g.kind is GateKind.MEASURE]

    def has_trailing_measurements_only(self) -> bool:
        """True when no unitary gate follows a measurement."""
        seen = False
        for g in self.gates:
            if g.kind is GateKind.MEASURE:
                seen = True
            elif seen:
                return False
        return True


def gate_count(circuit: QuantumCircuit) -> int:
    """Number of logic gates; measurements are not counted."""
    return sum(1 for g in circuit.gates if g.kind is not GateKind.MEASURE)


def depth(circuit: QuantumCircuit) -> int:
    """ASAP layer count over gates sharing a qubit, measurements excluded."""
    level = [0] * circuit.num_qubits
    best = 0
    for g in circuit.gates:
        if g.kind is GateKind.MEASURE:
            continue
        d = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = d
        best = max(best, d)
    return best


def controlled_of(gate: Gate, control_qubit: int) -> Gate:
    """Return ``gate`` with one more control appended (no decomposition)."""
    if gate.kind is GateKind.MEASURE:
        raise Unsupported("cannot add a control to a measurement")
    if control_qubit in gate.qubits:
        raise ControlOverlap(f"q{control_qubit} already used by {gate}")
    return replace(gate, controls=gate.controls + (control_qubit,))


def drop_control(gate: Gate, control_qubit: int) -> Gate:
    """Inverse of :func:`controlled_of`."""
    if control_qubit not in gate.controls:
        raise CircuitError(f"q{control_qubit} does not control {gate}")
    controls = tuple(c for c in gate.controls if c != control_qubit)
    kind = gate.kind
    if kind.is_x_family and len(controls) < kind.base_controls:
        kind = _X_BY_CONTROLS[len(controls)]
    return replace(gate, kind=kind, controls=controls)


_X_BY_CONTROLS = {0: GateKind.X, 1: GateKind.CX}


def _shift(q: int, removed: int) -> int:
    return q - 1 if q > removed else q


def remove_qubit(circuit: QuantumCircuit, q: int) -> QuantumCircuit:
    """Delete idle qubit ``q``; higher indices move down by one."""
    if not 0 <= q < circuit.num_qubits:
        raise CircuitError(f"no qubit {q} in a {circuit.num_qubits}-qubit circuit")
    for g in circuit.gates:
        if q in g.qubits:
            raise QubitInUse(f"q{q} is used by {g}")
    gates = [
        replace(
            g,
            targets=tuple(_shift(t, q) for t in g.targets),
            controls=tuple(_shift(c, q) for c in g.controls),
        )
        for g in circuit.gates
    ]
    return circuit.with_gates(gates, num_qubits=circuit.num_qubits - 1)


def insert_qubit(circuit: QuantumCircuit, q: int) -> QuantumCircuit:
    """Insert an idle qubit at index ``q``; inverse of :func:`remove_qubit`."""
    if not 0 <= q <= circuit.num_qubits:
        raise CircuitError(f"cannot insert qubit {q} into {circuit.num_qubits} qubits")

    def up(i):
        return i + 1 if i >= q else i

    gates = [
        replace(g, targets=tuple(up(t) for t in g.targets), controls=tuple(up(c) for c in g.controls))
        for g in circuit.gates
    ]
    return circuit.with_gates(gates, num_qubits=circuit.num_qubits + 1)


def circuits_equal(a: QuantumCircuit, b: QuantumCircuit) -> bool:
    """Structural equality: register sizes and the exact gate sequence."""
    return (
        a.num_qubits == b.num_qubits
        and a.num_clbits == b.num_clbits
        and a.gates == b.gates
    )


def inverse(circuit: QuantumCircuit) -> QuantumCircuit:
    """Reverse the gate order and conjugate every gate; measurements are rejected."""
    adjoint = {GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S,
               GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T}
    out = []
    for g in reversed(circuit.gates):
        if g.kind is GateKind.MEASURE:
            raise Unsupported("cannot invert a measurement")
        out.append(replace(g, kind=adjoint.get(g.kind, g.kind)))
    return circuit.with_gates(out)


def compose(first: QuantumCircuit, second: Sequence[Gate] | QuantumCircuit) -> QuantumCircuit:
    gates = second.gates if isinstance(second, QuantumCircuit) else tuple(second)
    return first.with_gates(first.gates + gates)

