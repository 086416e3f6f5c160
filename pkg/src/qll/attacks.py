"""
Adversary strategies against a locked circuit, and the key-guessing sweep.

``xgate`` guesses a key: the masks become X gates wherever the guess says
the key qubit flips, which is exactly unlocking with the guessed key.
``hgate`` leaves the masks in place and runs the locked circuit as is, so
the key qubit sits in superposition at every slot.

Everything is scored against the noiseless output of the correctly
unlocked circuit.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .circuit import GateKind, QuantumCircuit, measure
from .core import DEFAULT_PALETTE, Key, find_slots, lock_random, unlock
from .errors import SweepTooLarge
from .metrics import CountsDistribution, MetricsReport, report
from .sim import NoiseSpec, prepare_basis_input, sample_counts

DEFAULT_SHOTS = 1000
MAX_SWEEP_KEY_BITS = 12
WRONG_KEYS = 50
# corpus evaluation: short keys, several independent locks per circuit
CAMPAIGN_KEY_BITS = 2
CAMPAIGN_LOCKS = 10


def _flat(seed, *extra) -> tuple:
    base = tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)
    return base + extra


def _rng(seed, *path) -> np.random.Generator:
    """Independent stream for ``path`` under ``seed``; order of use does not matter."""
    return np.random.default_rng(np.random.SeedSequence(_flat(seed), spawn_key=tuple(path)))


def _with_data_measurements(circuit: QuantumCircuit, data_qubits: int) -> QuantumCircuit:
    if circuit.measurements():
        return circuit
    gates = circuit.gates + tuple(measure(q, q) for q in range(data_qubits))
    return QuantumCircuit(circuit.num_qubits, gates, num_clbits=data_qubits, qreg=circuit.qreg, creg=circuit.creg)


def _prepare(circuit: QuantumCircuit, input_state, data_qubits: int) -> QuantumCircuit:
    circuit = _with_data_measurements(circuit, data_qubits)
    if input_state is None:
        return circuit
    return prepare_basis_input(circuit, input_state, qubits=range(data_qubits))


def reference_counts(original: QuantumCircuit, shots: int = DEFAULT_SHOTS, seed=0, input_state=None) -> CountsDistribution:
    """Noiseless output of the original circuit; the yardstick for every metric."""
    return sample_counts(_prepare(original, input_state, original.num_qubits), shots, _rng(seed, 0))


def xgate_attack_eval(
    locked: QuantumCircuit,
    true_key: Key,
    guessed_key: Key,
    shots: int = DEFAULT_SHOTS,
    seed=0,
    key_qubit: int | None = None,
    input_state=None,
    noise: NoiseSpec | None = None,
) -> MetricsReport:
    original = unlock(locked, true_key, key_qubit)
    return score_guess(locked, original, guessed_key, shots, seed, key_qubit, input_state, noise)


def score_guess(
    locked: QuantumCircuit,
    original: QuantumCircuit,
    guessed_key: Key,
    shots: int = DEFAULT_SHOTS,
    seed=0,
    key_qubit: int | None = None,
    input_state=None,
    noise: NoiseSpec | None = None,
) -> MetricsReport:
    """Unlock with ``guessed_key`` and score the result against ``original``."""
    guessed = unlock(locked, guessed_key, key_qubit)
    ref = reference_counts(original, shots, seed, input_state)
    dist = sample_counts(_prepare(guessed, input_state, guessed.num_qubits), shots, _rng(seed, 1), noise)
    return report(dist, ref)


def hgate_attack_eval(
    locked: QuantumCircuit,
    shots: int = DEFAULT_SHOTS,
    seed=0,
    *,
    original: QuantumCircuit,
    key_qubit: int | None = None,
    input_state=None,
    noise: NoiseSpec | None = None,
) -> MetricsReport:
    """Run the still-masked circuit and measure the data qubits only."""
    kq = locked.num_qubits - 1 if key_qubit is None else key_qubit
    find_slots(locked, kq)
    if kq != locked.num_qubits - 1:
        raise ValueError("the key qubit must be the highest qubit")
    data = locked.num_qubits - 1
    ref = reference_counts(original, shots, seed, input_state)
    dist = sample_counts(_prepare(locked, input_state, data), shots, _rng(seed, 2), noise)
    return report(dist, ref)


def random_keys(n: int, count: int, seed=0) -> list[Key]:
    """``count`` uniformly random ``n``-bit keys; what an attacker without the key can draw."""
    rng = _rng(seed, 5)
    return [Key(tuple(int(b) for b in rng.integers(0, 2, size=n))) for _ in range(count)]


def random_wrong_keys(true_key: Key, count: int, seed=0) -> list[Key]:
    """``count`` keys drawn uniformly from all keys of the same length except ``true_key``."""
    if true_key.n == 1 and count:
        return [Key((1 - true_key.bits[0],))] * count
    rng = _rng(seed, 3)
    out = []
    while len(out) < count:
        k = Key(tuple(int(b) for b in rng.integers(0, 2, size=true_key.n)))
        if k != true_key:
            out.append(k)
    return out


@dataclass
class GuessRateResult:
    key: Key
    byte_rate: float
    bit_rate: float
    per_input: list[dict] = field(default_factory=list)
    count_divergence: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["key"] = str(self.key)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _bit_agreement(dist: CountsDistribution, reference_bits: str) -> float:
    b = dist.width
    total = 0.0
    for j in range(b):
        zeros, ones = dist.bit_counts(j)
        want = reference_bits[b - 1 - j]
        total += (ones if want == "1" else zeros) / dist.shots
    return total / b if b else 1.0


def _per_bit_majority(dist: CountsDistribution) -> str:
    bits = []
    for j in reversed(range(dist.width)):
        zeros, ones = dist.bit_counts(j)
        bits.append("1" if ones > zeros else "0")
    return "".join(bits)


def _normalize_inputs(inputs, width: int) -> list[int]:
    out = []
    for value in inputs:
        out.append(int(value, 2) if isinstance(value, str) else int(value))
    return out


def key_sweep(
    locked: QuantumCircuit,
    true_key: Key,
    inputs: Iterable | None = None,
    shots: int = DEFAULT_SHOTS,
    seed=0,
    key_qubit: int | None = None,
    input_qubits: Sequence[int] | None = None,
    max_key_bits: int = MAX_SWEEP_KEY_BITS,
    noise: NoiseSpec | None = None,
) -> list[GuessRateResult]:
    """Try every key on every input and score it against the true key.

    ``byte_rate``: share of shots whose whole outcome equals the true key's
    most frequent outcome. ``bit_rate``: per-bit agreement with the true
    key's per-bit majority, averaged over bits. Both are averaged over
    inputs. ``count_divergence`` is the summed absolute count difference
    over all outcomes, divided by ``shots * inputs``.
    Results come back in key order ("00..0" first).
    """
    n = true_key.n
    if n > max_key_bits:
        raise SweepTooLarge(f"{n}-bit key exceeds the {max_key_bits}-bit sweep limit")
    data = locked.num_qubits - 1
    qubits = list(range(data)) if input_qubits is None else list(input_qubits)
    if inputs is None:
        inputs = range(2 ** len(qubits))
    values = _normalize_inputs(inputs, len(qubits))

    def run(key: Key, value: int, key_index: int, input_index: int) -> CountsDistribution:
        circuit = _with_data_measurements(unlock(locked, key, key_qubit), data)
        circuit = prepare_basis_input(circuit, value, qubits=qubits)
        return sample_counts(circuit, shots, _rng(seed, 10, key_index, input_index), noise)

    references = []
    for i, value in enumerate(values):
        ref = run(true_key, value, 2 ** n, i)
        references.append((ref, ref.argmax(), _per_bit_majority(ref)))

    results = []
    for key_index, bits in enumerate(itertools.product((0, 1), repeat=n)):
        key = Key(bits)
        per_input = []
        divergence = 0
        for i, value in enumerate(values):
            ref, best, majority = references[i]
            dist = ref if key == true_key else run(key, value, key_index, i)
            byte = dist[best] / dist.shots
            bit = _bit_agreement(dist, majority)
            per_input.append({"input": value, "byte_rate": byte, "bit_rate": bit})
            divergence += sum(abs(dist[o] - ref[o]) for o in set(dist.counts) | set(ref.counts))
        results.append(
            GuessRateResult(
                key=key,
                byte_rate=float(np.mean([p["byte_rate"] for p in per_input])),
                bit_rate=float(np.mean([p["bit_rate"] for p in per_input])),
                per_input=per_input,
                count_divergence=divergence / (shots * len(values)),
            )
        )
    return results


@dataclass
class LockEvaluation:
    """Everything the evaluate command reports for one locked circuit."""

    circuit: str
    key: str
    original: MetricsReport
    correct_key: MetricsReport
    xgate: list[MetricsReport]
    hgate: MetricsReport
    wrong_keys: list[str]

    @property
    def xgate_mean_tvd(self) -> float:
        return float(np.mean([r.tvd for r in self.xgate]))

    @property
    def xgate_max_tvd(self) -> float:
        return max(r.tvd for r in self.xgate)

    def summary(self) -> dict:
        xs = self.xgate
        return {
            "circuit": self.circuit,
            "key": self.key,
            "dfc_original": self.original.dfc,
            "tvd_correct_key": self.correct_key.tvd,
            "xgate_mean_tvd": self.xgate_mean_tvd,
            "xgate_max_tvd": self.xgate_max_tvd,
            "xgate_mean_hvd": float(np.mean([r.hvd for r in xs])),
            "xgate_mean_dfc": float(np.mean([r.dfc for r in xs])),
            "xgate_min_dfc": min(r.dfc for r in xs),
            "hgate_tvd": self.hgate.tvd,
            "hgate_hvd": self.hgate.hvd,
            "hgate_dfc": self.hgate.dfc,
        }

    def to_dict(self) -> dict:
        return {
            "summary": self.summary(),
            "original": self.original.to_dict(),
            "correct_key": self.correct_key.to_dict(),
            "hgate": self.hgate.to_dict(),
            "xgate": [dict(r.to_dict(), key=k) for r, k in zip(self.xgate, self.wrong_keys)],
        }


def evaluate_lock(
    original: QuantumCircuit,
    locked: QuantumCircuit,
    key: Key,
    shots: int = DEFAULT_SHOTS,
    seed=0,
    n_wrong: int = WRONG_KEYS,
    input_state=None,
    noise: NoiseSpec | None = None,
    name: str = "",
) -> LockEvaluation:
    """Score the original, the correct key, ``n_wrong`` random wrong keys and the H strategy."""
    ref = reference_counts(original, shots, seed, input_state)
    orig_run = sample_counts(_prepare(original, input_state, original.num_qubits), shots, _rng(seed, 4), noise)
    correct = xgate_attack_eval(locked, key, key, shots, seed, input_state=input_state, noise=noise)
    wrong = random_wrong_keys(key, n_wrong, seed)
    xs = [
        xgate_attack_eval(locked, key, k, shots, _flat(seed, 100 + i), input_state=input_state, noise=noise)
        for i, k in enumerate(wrong)
    ]
    hg = hgate_attack_eval(locked, shots, seed, original=original, input_state=input_state, noise=noise)
    return LockEvaluation(
        circuit=name or original.name,
        key=str(key),
        original=report(orig_run, ref),
        correct_key=correct,
        xgate=xs,
        hgate=hg,
        wrong_keys=[str(k) for k in wrong],
    )


@dataclass
class CampaignResult:
    """Several independent locks of one circuit, each attacked both ways."""

    circuit: str
    input_state: int | None
    key_bits: int
    locks: list[LockEvaluation]

    @property
    def xgate_tvds(self) -> list[float]:
        return [r.tvd for ev in self.locks for r in ev.xgate]

    @property
    def xgate_dfcs(self) -> list[float]:
        return [r.dfc for ev in self.locks for r in ev.xgate]

    def summary(self) -> dict:
        xs = self.xgate_tvds
        return {
            "circuit": self.circuit,
            "key_bits": self.key_bits,
            "locks": len(self.locks),
            "dfc_original": min(ev.original.dfc for ev in self.locks),
            "tvd_correct_key": max(ev.correct_key.tvd for ev in self.locks),
            "xgate_mean_tvd": float(np.mean(xs)),
            "xgate_max_tvd": max(xs),
            "xgate_mean_hvd": float(np.mean([r.hvd for ev in self.locks for r in ev.xgate])),
            "xgate_mean_dfc": float(np.mean(self.xgate_dfcs)),
            "xgate_min_dfc": min(self.xgate_dfcs),
            "hgate_mean_tvd": float(np.mean([ev.hgate.tvd for ev in self.locks])),
            "hgate_mean_hvd": float(np.mean([ev.hgate.hvd for ev in self.locks])),
            "hgate_mean_dfc": float(np.mean([ev.hgate.dfc for ev in self.locks])),
        }

    def to_dict(self) -> dict:
        return {"summary": self.summary(), "locks": [ev.to_dict() for ev in self.locks]}


def run_campaign(
    original: QuantumCircuit,
    input_state=None,
    key_bits: int = CAMPAIGN_KEY_BITS,
    locks: int = CAMPAIGN_LOCKS,
    shots: int = DEFAULT_SHOTS,
    seed=0,
    n_wrong: int = WRONG_KEYS,
    palette=DEFAULT_PALETTE,
    noise: NoiseSpec | None = None,
    name: str = "",
) -> CampaignResult:
    """Lock ``original`` ``locks`` times with fresh ``key_bits``-bit keys and evaluate each lock."""
    evaluations = []
    for t in range(locks):
        locked, record = lock_random(original, key_bits, _flat(seed, t), palette)
        evaluations.append(
            evaluate_lock(
                original, locked, record.key, shots, _flat(seed, t), n_wrong,
                input_state=input_state, noise=noise, name=name,
            )
        )
    return CampaignResult(name or original.name, input_state, key_bits, evaluations)


def is_masked(circuit: QuantumCircuit, key_qubit: int) -> bool:
    return any(g.kind is GateKind.H and g.targets == (key_qubit,) for g in circuit.gates)
