"""
Distances between measured outcome distributions.

All metrics work on raw counts and refuse to compare distributions with
different shot totals or bit widths; renormalizing would hide experiment
bugs. Bitstrings follow the project convention: bit 0 is the rightmost
character.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Mapping

from .errors import AmbiguousOutcome, MetricError, ShotMismatch, WidthMismatch, ZeroShots


class CountsDistribution:
    """Outcome bitstring -> count, with the total number of shots."""

    def __init__(self, counts: Mapping[str, int], shots: int | None = None, width: int | None = None):
        clean = {}
        for key, value in counts.items():
            if set(key) - {"0", "1"}:
                raise MetricError(f"outcome {key!r} is not a bitstring")
            value = int(value)
            if value < 0:
                raise MetricError(f"negative count for {key!r}")
            if value:
                clean[key] = value
        widths = {len(k) for k in counts}
        if len(widths) > 1:
            raise WidthMismatch(f"mixed outcome widths {sorted(widths)}")
        if width is None:
            width = widths.pop() if widths else 0
        elif widths and widths != {width}:
            raise WidthMismatch(f"outcomes have width {widths.pop()}, expected {width}")
        total = sum(clean.values())
        if shots is None:
            shots = total
        if shots != total:
            raise MetricError(f"counts sum to {total} but shots = {shots}")
        self.counts = dict(sorted(clean.items()))
        self.shots = int(shots)
        self.width = int(width)

    def __getitem__(self, outcome: str) -> int:
        return self.counts.get(outcome, 0)

    def __eq__(self, other):
        if not isinstance(other, CountsDistribution):
            return NotImplemented
        return (self.counts, self.shots, self.width) == (other.counts, other.shots, other.width)

    def __repr__(self):
        return f"CountsDistribution({self.counts}, shots={self.shots})"

    def probabilities(self) -> dict[str, float]:
        return {k: v / self.shots for k, v in self.counts.items()}

    def bit_counts(self, bit: int) -> tuple[int, int]:
        """Shots where ``bit`` reads 0 and 1 respectively."""
        ones = sum(v for k, v in self.counts.items() if k[self.width - 1 - bit] == "1")
        return self.shots - ones, ones

    def marginal(self, bit: int) -> "CountsDistribution":
        zeros, ones = self.bit_counts(bit)
        return CountsDistribution({"0": zeros, "1": ones}, shots=self.shots, width=1)

    def argmax(self) -> str:
        """Most frequent outcome; ties raise ``AmbiguousOutcome``."""
        if not self.counts:
            raise ZeroShots("empty distribution has no argmax")
        best = max(self.counts.values())
        top = [k for k, v in self.counts.items() if v == best]
        if len(top) > 1:
            raise AmbiguousOutcome(f"tie between outcomes {top}")
        return top[0]

    def to_dict(self) -> dict:
        return {"shots": self.shots, "counts": dict(self.counts)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "CountsDistribution":
        return cls(data["counts"], shots=data["shots"])

    @classmethod
    def from_json(cls, text: str) -> "CountsDistribution":
        return cls.from_dict(json.loads(text))


def _check_pair(lock: CountsDistribution, orig: CountsDistribution) -> None:
    if lock.shots != orig.shots:
        raise ShotMismatch(f"{lock.shots} shots vs {orig.shots} shots")
    if lock.width != orig.width:
        raise WidthMismatch(f"{lock.width}-bit vs {orig.width}-bit outcomes")
    if lock.shots == 0:
        raise ZeroShots("distributions have no shots")


def tvd(lock: CountsDistribution, orig: CountsDistribution) -> float:
    """Total variation distance, sum of |count difference| over 2N."""
    _check_pair(lock, orig)
    keys = set(lock.counts) | set(orig.counts)
    diff = sum(abs(lock[k] - orig[k]) for k in keys)
    return diff / (2 * lock.shots)


def hvd(lock: CountsDistribution, orig: CountsDistribution) -> float:
    """Hamming variation distance: per-bit count differences summed over bits, over 2N.

    Equal to the sum over bits of the marginal TVD, so it ranges over [0, b].
    """
    _check_pair(lock, orig)
    diff = 0
    for j in range(lock.width):
        for a, b in zip(lock.bit_counts(j), orig.bit_counts(j)):
            diff += abs(a - b)
    return diff / (2 * lock.shots)


def dfc(dist: CountsDistribution, correct_outcome: str) -> float:
    """Degree of functional corruption: (correct count - best wrong count) / N."""
    if dist.shots <= 0:
        raise ZeroShots("dfc needs at least one shot")
    if dist.width and len(correct_outcome) != dist.width:
        raise WidthMismatch(f"correct outcome {correct_outcome!r} has the wrong width")
    wrong = max((v for k, v in dist.counts.items() if k != correct_outcome), default=0)
    return (dist[correct_outcome] - wrong) / dist.shots


def accuracy(dist: CountsDistribution, correct_outcome: str) -> float:
    if dist.shots <= 0:
        raise ZeroShots("accuracy needs at least one shot")
    return dist[correct_outcome] / dist.shots


@dataclass
class MetricsReport:
    tvd: float
    hvd: float
    dfc: float
    accuracy: float
    shots: int
    output_bits: int

    def to_dict(self) -> dict:
        return asdict(self)


def report(lock: CountsDistribution, reference: CountsDistribution, correct_outcome: str | None = None) -> MetricsReport:
    """All four metrics of ``lock`` against ``reference``.

    ``correct_outcome`` defaults to the reference argmax.
    """
    if correct_outcome is None:
        correct_outcome = reference.argmax()
    return MetricsReport(
        tvd=tvd(lock, reference),
        hvd=hvd(lock, reference),
        dfc=dfc(lock, correct_outcome),
        accuracy=accuracy(lock, correct_outcome),
        shots=lock.shots,
        output_bits=lock.width,
    )
