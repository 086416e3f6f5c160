"""Bundled reversible benchmark circuits and small worked-example fixtures."""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources

from ..circuit import Gate, GateKind, QuantumCircuit
from ..core import Key, LockPlan, LockRecord, apply_lock, encrypt
from ..qasm import parse_qasm


@dataclass(frozen=True)
class BenchmarkInfo:
    name: str
    file: str
    qubits: int
    gates: int
    depth: int
    output_qubits: tuple[int, ...]
    input_qubits: tuple[int, ...]
    test_vector: str
    reported: dict

    @property
    def test_input(self) -> int:
        """The test vector as an integer over all qubits (qubit 0 = bit 0)."""
        return int(self.test_vector, 2)


def _text(filename: str) -> str:
    return resources.files(__name__).joinpath(filename).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def _manifest() -> dict:
    return json.loads(_text("manifest.json"))


def names() -> list[str]:
    return [b["name"] for b in _manifest()["benchmarks"]]


def info(name: str) -> BenchmarkInfo:
    for b in _manifest()["benchmarks"]:
        if b["name"] == name:
            return BenchmarkInfo(
                name=b["name"],
                file=b["file"],
                qubits=b["qubits"],
                gates=b["gates"],
                depth=b["depth"],
                output_qubits=tuple(b["output_qubits"]),
                input_qubits=tuple(b["input_qubits"]),
                test_vector=b["test_vector"],
                reported=dict(b["reported"]),
            )
    raise KeyError(f"no bundled benchmark named {name!r}")


def source(name: str) -> str:
    """Raw QASM text of a benchmark or fixture."""
    if name in _manifest()["fixtures"]:
        return _text(_manifest()["fixtures"][name]["file"])
    return _text(info(name).file)


def load(name: str) -> QuantumCircuit:
    return replace(parse_qasm(source(name)), name=name)


def load_all() -> dict[str, QuantumCircuit]:
    return {n: load(n) for n in names()}


def fixture(name: str) -> dict:
    return dict(_manifest()["fixtures"][name])


def five_gate_lock(seed: int = 5) -> tuple[QuantumCircuit, QuantumCircuit, LockRecord]:
    """The five-gate worked example locked with key 100101 over gates 1, 2 and 4.

    Dummies: two between the first and second real gate, one between the
    second and third. Returns (original, locked, record).
    """
    fx = fixture("five_gate")
    original = load("five_gate")
    key = Key.from_string(fx["key"])
    locked, record = encrypt(original, key, seed=seed, real_gates=fx["real_gates"])
    return original, locked, record


def alu_sweep_lock() -> tuple[QuantumCircuit, QuantumCircuit, LockRecord]:
    """1-bit ALU-style datapath locked with key 000 and three fixed CX dummies."""
    fx = fixture("alu1")
    original = load("alu1")
    dummies = tuple(
        (d["insert_before"], Gate(GateKind.CX, (d["target"],), tuple(d["controls"])))
        for d in fx["dummies"]
    )
    key = Key.from_string(fx["key"])
    locked, record = apply_lock(original, key, LockPlan(real_gates=(), dummies=dummies))
    return original, locked, record
