"""
Key generation, locking, unlocking and key-aware simplification.

One extra qubit, the key qubit, is appended to the circuit. Every key bit
owns one *slot*: a gate controlled by the key qubit. A 1-bit slot is an
original gate that gained the key control; a 0-bit slot is a freshly
inserted dummy. Slots appear in circuit order in the same order as the key
bits, and each is preceded on the key qubit by a masking Hadamard.

Unlocking swaps each mask for either nothing or an X so the key qubit walks
through the key bits; simplification then folds the now-classical key qubit
away.
"""
from __future__ import annotations

import json
import warnings
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .circuit import (
    Gate,
    GateKind,
    QuantumCircuit,
    circuits_equal,
    controlled_of,
    drop_control,
    gate_count,
    h,
    remove_qubit,
    x,
)
from .errors import (
    KeyLengthMismatch,
    KeyTooLong,
    LockError,
    MalformedLockedCircuit,
    MeasurePresent,
    ResidualSuperposition,
    ZeroLength,
)

DEFAULT_PALETTE = (GateKind.CX,)


class StructuralLeakageWarning(UserWarning):
    """Dummy gates look different from the gates they hide among."""


@dataclass(frozen=True)
class Key:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ZeroLength("a key needs at least one bit")
        if set(bits) - {0, 1}:
            raise LockError(f"key bits must be 0 or 1, got {bits}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> "Key":
        """Bit 0 is the leftmost character."""
        if not text or set(text) - {"0", "1"}:
            raise LockError(f"bad key string {text!r}")
        return cls(tuple(int(c) for c in text))

    def __str__(self):
        return "".join(map(str, self.bits))

    def __len__(self):
        return len(self.bits)

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def n1(self) -> int:
        return sum(self.bits)

    @property
    def n0(self) -> int:
        return self.n - self.n1

    def to_dict(self) -> dict:
        return {"n": self.n, "bits": str(self)}

    @classmethod
    def from_dict(cls, data) -> "Key":
        key = cls.from_string(data["bits"])
        if "n" in data and int(data["n"]) != key.n:
            raise KeyLengthMismatch(f"key file says n={data['n']} but holds {key.n} bits")
        return key


def gen_key(n: int, seed=None) -> Key:
    """Uniformly random ``n``-bit key."""
    if n < 1:
        raise ZeroLength("key length must be at least 1")
    rng = np.random.default_rng(seed)
    return Key(tuple(int(b) for b in rng.integers(0, 2, size=n)))


@dataclass(frozen=True)
class Slot:
    position: int
    role: str  # "real" or "dummy"
    original_gate_index: int | None = None
    dummy_kind: GateKind | None = None

    def to_dict(self) -> dict:
        return {
            "position": self.position,
            "role": self.role,
            "original_gate_index": self.original_gate_index,
            "dummy_kind": self.dummy_kind.value if self.dummy_kind else None,
        }

    @classmethod
    def from_dict(cls, d) -> "Slot":
        kind = d.get("dummy_kind")
        return cls(
            position=int(d["position"]),
            role=d["role"],
            original_gate_index=d.get("original_gate_index"),
            dummy_kind=GateKind(kind) if kind else None,
        )


@dataclass(frozen=True)
class LockRecord:
    key: Key
    key_qubit: int
    slots: tuple[Slot, ...]
    h_mask_positions: tuple[int, ...]
    seed: int | None = None

    def __post_init__(self):
        if len(self.slots) != self.key.n:
            raise LockError("one slot per key bit is required")
        for bit, slot in zip(self.key.bits, self.slots):
            if (slot.role == "real") != bool(bit):
                raise LockError(f"slot {slot} disagrees with its key bit {bit}")

    def to_dict(self) -> dict:
        return {
            "key": self.key.to_dict(),
            "key_qubit": self.key_qubit,
            "slots": [s.to_dict() for s in self.slots],
            "h_mask_positions": list(self.h_mask_positions),
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d) -> "LockRecord":
        return cls(
            key=Key.from_dict(d["key"]),
            key_qubit=int(d["key_qubit"]),
            slots=tuple(Slot.from_dict(s) for s in d["slots"]),
            h_mask_positions=tuple(int(p) for p in d["h_mask_positions"]),
            seed=d.get("seed"),
        )

    @classmethod
    def from_json(cls, text: str) -> "LockRecord":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class LockPlan:
    """Every random choice of a lock.

    ``real_gates`` are sorted indices of original gates to put under key
    control. ``dummies`` lists ``(insert_before, gate)`` in key order, where
    ``insert_before`` is an original-gate index in ``0..m`` and ``gate`` has
    no key control yet.
    """

    real_gates: tuple[int, ...]
    dummies: tuple[tuple[int, Gate], ...] = ()


def _split_measurements(circuit: QuantumCircuit) -> tuple[list[Gate], list[Gate]]:
    if not circuit.has_trailing_measurements_only():
        raise MeasurePresent("measurements may only appear after the last logic gate")
    body = [g for g in circuit.gates if g.kind is not GateKind.MEASURE]
    return body, circuit.measurements()


def _random_dummy(kind: GateKind, data_qubits: int, rng: np.random.Generator) -> Gate:
    arity = 1 + kind.base_controls
    if data_qubits < arity:
        raise LockError(f"a {kind.value} dummy needs {arity} data qubits, circuit has {data_qubits}")
    qs = [int(q) for q in rng.choice(data_qubits, size=arity, replace=False)]
    return Gate(kind, targets=(qs[-1],), controls=tuple(qs[:-1]))


def plan_lock(
    circuit: QuantumCircuit,
    key: Key,
    rng: np.random.Generator,
    palette: Sequence[GateKind] = DEFAULT_PALETTE,
    real_gates: Sequence[int] | None = None,
) -> LockPlan:
    """Choose real gates and dummy gates/positions for ``key``."""
    body, _ = _split_measurements(circuit)
    m = len(body)
    if key.n1 > m:
        raise KeyTooLong(f"key has {key.n1} one-bits but the circuit has only {m} gates")
    if real_gates is None:
        real = sorted(int(i) for i in rng.choice(m, size=key.n1, replace=False))
    else:
        real = sorted(int(i) for i in real_gates)
        if len(real) != key.n1 or len(set(real)) != len(real) or any(not 0 <= i < m for i in real):
            raise LockError(f"real gate selection {real_gates} does not fit {key.n1} one-bits over {m} gates")
    palette = list(palette)
    if not palette:
        raise LockError("dummy palette is empty")

    dummies = []
    ones_seen = 0
    run: list[int] = []

    def flush():
        # dummies within one zero-run are interchangeable, so sorting keeps key order
        for point in sorted(run):
            kind = palette[int(rng.integers(len(palette)))]
            dummies.append((point, _random_dummy(kind, circuit.num_qubits, rng)))
        run.clear()

    for bit in key.bits:
        if bit:
            flush()
            ones_seen += 1
            continue
        lo = real[ones_seen - 1] + 1 if ones_seen else 0
        hi = real[ones_seen] if ones_seen < len(real) else m
        run.append(int(rng.integers(lo, hi + 1)))
    flush()
    return LockPlan(real_gates=tuple(real), dummies=tuple(dummies))


def apply_lock(
    circuit: QuantumCircuit, key: Key, plan: LockPlan, seed: int | None = None
) -> tuple[QuantumCircuit, LockRecord]:
    """Build the locked circuit described by ``plan``; deterministic."""
    body, meas = _split_measurements(circuit)
    m = len(body)
    k = circuit.num_qubits
    real = set(plan.real_gates)
    by_point: dict[int, list[Gate]] = {}
    for point, gate in plan.dummies:
        if not 0 <= point <= m:
            raise LockError(f"dummy insertion point {point} outside 0..{m}")
        by_point.setdefault(point, []).append(gate)

    gates: list[Gate] = []
    slots: list[Slot] = []
    masks: list[int] = []

    def add_slot(gate: Gate, slot: Slot):
        masks.append(len(gates))
        gates.append(h(k))
        slots.append(Slot(len(gates), slot.role, slot.original_gate_index, slot.dummy_kind))
        gates.append(controlled_of(gate, k))

    for i in range(m + 1):
        for dummy in by_point.get(i, ()):
            add_slot(dummy, Slot(0, "dummy", dummy_kind=dummy.kind))
        if i == m:
            break
        if i in real:
            add_slot(body[i], Slot(0, "real", original_gate_index=i))
        else:
            gates.append(body[i])
    gates.extend(meas)

    spelled = tuple(1 if s.role == "real" else 0 for s in slots)
    if spelled != key.bits:
        raise LockError(f"plan spells key {''.join(map(str, spelled))}, expected {key}")
    locked = circuit.with_gates(gates, num_qubits=k + 1)
    record = LockRecord(key=key, key_qubit=k, slots=tuple(slots), h_mask_positions=tuple(masks), seed=seed)
    return locked, record


def _leakage_check(circuit: QuantumCircuit, plan: LockPlan) -> None:
    present = Counter(g.kind for g in circuit.gates if g.kind is not GateKind.MEASURE)
    dummy_kinds = Counter(g.kind for _, g in plan.dummies)
    foreign = sorted(k.value for k in dummy_kinds if k not in present)
    if foreign:
        real_hist = {k.value: v for k, v in sorted(present.items(), key=lambda kv: kv[0].value)}
        dummy_hist = {k.value: v for k, v in sorted(dummy_kinds.items(), key=lambda kv: kv[0].value)}
        warnings.warn(
            f"dummy gate kinds {foreign} never occur in the original circuit "
            f"(original kinds {real_hist}, dummy kinds {dummy_hist})",
            StructuralLeakageWarning,
            stacklevel=3,
        )


def encrypt(
    circuit: QuantumCircuit,
    key: Key,
    seed=None,
    palette: Sequence[GateKind] = DEFAULT_PALETTE,
    real_gates: Sequence[int] | None = None,
) -> tuple[QuantumCircuit, LockRecord]:
    """Lock ``circuit`` with ``key``.

    The result has one extra (highest) qubit and ``m + n0 + n`` logic gates.
    All randomness comes from ``seed``.
    """
    rng = np.random.default_rng(seed)
    plan = plan_lock(circuit, key, rng, palette=palette, real_gates=real_gates)
    _leakage_check(circuit, plan)
    return apply_lock(circuit, key, plan, seed=seed if isinstance(seed, int) else None)


def lock_random(
    circuit: QuantumCircuit,
    n: int,
    seed=None,
    palette: Sequence[GateKind] = DEFAULT_PALETTE,
) -> tuple[QuantumCircuit, LockRecord]:
    """Draw an ``n``-bit key and lock with it; key and placement use separate streams of ``seed``."""
    key_stream, lock_stream = np.random.SeedSequence(seed).spawn(2)
    key = gen_key(n, key_stream)
    locked, record = encrypt(circuit, key, seed=lock_stream, palette=palette)
    return locked, replace(record, seed=seed if isinstance(seed, int) else None)


def _default_key_qubit(circuit: QuantumCircuit, key_qubit: int | None) -> int:
    if key_qubit is None:
        key_qubit = circuit.num_qubits - 1
    if not 0 <= key_qubit < circuit.num_qubits:
        raise MalformedLockedCircuit(f"key qubit {key_qubit} outside the circuit")
    return key_qubit


def find_slots(locked: QuantumCircuit, key_qubit: int | None = None) -> list[tuple[int, int]]:
    """Validate the mask scaffold and return ``(mask_index, slot_index)`` pairs.

    On the key qubit the only gates allowed are alternating masking H and
    key-controlled gates, starting with an H and ending with a slot.
    """
    kq = _default_key_qubit(locked, key_qubit)
    pairs = []
    pending = None
    for i, g in enumerate(locked.gates):
        if kq not in g.qubits:
            continue
        if g.kind is GateKind.H and g.targets == (kq,) and not g.controls:
            if pending is not None:
                raise MalformedLockedCircuit(f"two masking H gates in a row at gate {i}")
            pending = i
        elif kq in g.controls:
            if pending is None:
                raise MalformedLockedCircuit(f"key-controlled gate {i} ({g}) has no masking H")
            pairs.append((pending, i))
            pending = None
        else:
            raise MalformedLockedCircuit(f"unexpected gate on the key qubit at {i}: {g}")
    if pending is not None:
        raise MalformedLockedCircuit("masking H without a following key-controlled gate")
    if not pairs:
        raise MalformedLockedCircuit("no masked key slots found")
    return pairs


def decrypt(locked: QuantumCircuit, key: Key, key_qubit: int | None = None) -> QuantumCircuit:
    """Replace the masks by the X gates that walk the key qubit through ``key``."""
    kq = _default_key_qubit(locked, key_qubit)
    pairs = find_slots(locked, kq)
    if len(pairs) != key.n:
        raise KeyLengthMismatch(f"circuit has {len(pairs)} key slots, key has {key.n} bits")
    replace_with = {}
    prev = 0
    for (mask, _), bit in zip(pairs, key.bits):
        replace_with[mask] = x(kq) if bit != prev else None
        prev = bit
    gates = []
    for i, g in enumerate(locked.gates):
        if i in replace_with:
            if replace_with[i] is not None:
                gates.append(replace_with[i])
        else:
            gates.append(g)
    return locked.with_gates(gates)


def simplify(unlocked: QuantumCircuit, key_qubit: int | None = None) -> QuantumCircuit:
    """Constant-fold the classical key qubit, then delete it."""
    kq = _default_key_qubit(unlocked, key_qubit)
    state = 0
    gates = []
    for g in unlocked.gates:
        if kq not in g.qubits:
            gates.append(g)
        elif g.kind is GateKind.X and g.targets == (kq,) and not g.controls:
            state ^= 1
        elif kq in g.controls:
            if state:
                gates.append(drop_control(g, kq))
        else:
            raise ResidualSuperposition(f"{g} leaves the key qubit non-classical")
    return remove_qubit(unlocked.with_gates(gates), kq)


def unlock(locked: QuantumCircuit, key: Key, key_qubit: int | None = None) -> QuantumCircuit:
    """decrypt followed by simplify."""
    kq = _default_key_qubit(locked, key_qubit)
    return simplify(decrypt(locked, key, kq), kq)


def key_readout(locked: QuantumCircuit, record: LockRecord) -> Key:
    """Read the key back from slot roles, checking the record matches the circuit."""
    pairs = find_slots(locked, record.key_qubit)
    if [s for _, s in pairs] != [slot.position for slot in record.slots]:
        raise MalformedLockedCircuit("lock record slot positions do not match the circuit")
    return Key(tuple(1 if s.role == "real" else 0 for s in record.slots))


def census(circuit: QuantumCircuit, key: Key, locked: QuantumCircuit) -> dict:
    return {
        "m": gate_count(circuit),
        "n": key.n,
        "n1": key.n1,
        "n0": key.n0,
        "locked_gate_count": gate_count(locked),
    }


@dataclass
class RoundTripReport:
    structural: bool
    unitary: bool | None
    unitary_checked: bool = field(default=True)


def verify_roundtrip(circuit: QuantumCircuit, key: Key, seed=None, **lock_kwargs) -> RoundTripReport:
    from .sim import MAX_UNITARY_QUBITS, unitaries_equal_up_to_phase, unitary_of

    locked, _ = encrypt(circuit, key, seed, **lock_kwargs)
    restored = unlock(locked, key)
    structural = circuits_equal(restored, circuit)
    if circuit.num_qubits > MAX_UNITARY_QUBITS:
        return RoundTripReport(structural, None, unitary_checked=False)
    unitary = unitaries_equal_up_to_phase(
        unitary_of(restored.unitary_part()), unitary_of(circuit.unitary_part()), tol=1e-9
    )
    return RoundTripReport(structural, unitary)
