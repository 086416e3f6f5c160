"""Exception hierarchy shared by every qll module."""

from __future__ import annotations


class QLLError(Exception):
    """Base class for all toolkit errors."""


# circuit IR
class CircuitError(QLLError, ValueError):
    pass


class ControlOverlap(CircuitError):
    pass


class Unsupported(CircuitError):
    pass


class QubitInUse(CircuitError):
    pass


# qasm io
class QasmError(QLLError):
    """Raised for any problem reading OpenQASM text; carries a diagnostic."""

    def __init__(self, diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


class QasmSyntaxError(QasmError):
    pass


class UnsupportedGate(QasmError):
    def __init__(self, name, diagnostic):
        self.name = name
        super().__init__(diagnostic)


class UndeclaredRegister(QasmError):
    pass


class NotExpressible(QLLError, ValueError):
    """A gate has no exact decomposition into the serializable gate set."""


# simulation
class SimulationError(QLLError, ValueError):
    pass


class MeasureInUnitaryRun(SimulationError):
    pass


class ZeroShots(SimulationError):
    pass


class TooLarge(SimulationError):
    pass


class DimensionMismatch(SimulationError):
    pass


# locking
class LockError(QLLError, ValueError):
    pass


class ZeroLength(LockError):
    pass


class KeyTooLong(LockError):
    pass


class MeasurePresent(LockError):
    pass


class MalformedLockedCircuit(LockError):
    pass


class KeyLengthMismatch(LockError):
    pass


class ResidualSuperposition(LockError):
    pass


# metrics / attacks
class MetricError(QLLError, ValueError):
    pass


class ShotMismatch(MetricError):
    pass


class WidthMismatch(MetricError):
    pass


class AmbiguousOutcome(MetricError):
    pass


class SweepTooLarge(QLLError, ValueError):
    pass
