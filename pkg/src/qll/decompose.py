"""
Exact decompositions of multi-controlled gates into x/cx/ccx/h/s/sdg/t/tdg.

Gates with three or more controls borrow one idle qubit (in any state; it
is returned unchanged). An ancilla-free three-control X is impossible in
this gate set: every gate has determinant 1 on four qubits, the target
gate has determinant -1.
"""
from __future__ import annotations

from .circuit import Gate, GateKind, ccx, cx, h, x
from .errors import NotExpressible


def _g(kind: GateKind, t: int) -> Gate:
    return Gate(kind, (t,))


def mcx(controls: list[int], target: int, free: list[int]) -> list[Gate]:
    """Multi-controlled X; ``free`` lists qubits that may be borrowed."""
    k = len(controls)
    if k == 0:
        return [x(target)]
    if k == 1:
        return [cx(controls[0], target)]
    if k == 2:
        return [ccx(controls[0], controls[1], target)]
    if not free:
        raise NotExpressible(f"{k}-control X needs one borrowed qubit")
    anc = free[0]
    rest = free[1:]
    m1 = (k + 1) // 2
    c1, c2 = controls[:m1], controls[m1:]
    first = mcx(c1, anc, c2 + [target] + rest)
    second = mcx(c2 + [anc], target, c1 + rest)
    return first + second + first + second


# H = V X V^dagger with V = S H T
_V = [GateKind.T, GateKind.H, GateKind.S]
_V_DAG = [GateKind.SDG, GateKind.H, GateKind.TDG]


def decompose(gate: Gate, free: list[int]) -> list[Gate]:
    """Gates in the named set that implement ``gate`` exactly."""
    kind, t, cs = gate.kind, gate.target, list(gate.controls)
    if kind.is_x_family:
        return mcx(cs, t, free)
    if not cs:
        return [gate]
    if kind is GateKind.Z:
        return [h(t)] + mcx(cs, t, free) + [h(t)]
    if kind is GateKind.Y:
        return [_g(GateKind.SDG, t)] + mcx(cs, t, free) + [_g(GateKind.S, t)]
    if kind is GateKind.H:
        return [_g(k, t) for k in _V_DAG] + mcx(cs, t, free) + [_g(k, t) for k in _V]
    if kind in (GateKind.S, GateKind.SDG) and len(cs) == 1:
        fwd, back = (GateKind.T, GateKind.TDG) if kind is GateKind.S else (GateKind.TDG, GateKind.T)
        c = cs[0]
        return [_g(fwd, c), _g(fwd, t), cx(c, t), _g(back, t), cx(c, t)]
    raise NotExpressible(f"no exact decomposition for {len(cs)}-controlled {kind.value}")


def needs_borrowed_qubit(gate: Gate) -> bool:
    return len(gate.controls) >= 3
