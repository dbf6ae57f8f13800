"""Exception taxonomy shared by every engine module.

Each error carries a stable ``code`` (its class name) that the CLI maps to
exit codes and the HTTP service maps to ``{"error": code}`` payloads.
"""

from __future__ import annotations


class JdspError(Exception):
    """Base class for all engine errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- graph model ---------------------------------------------------------

class GraphFormatError(JdspError):
    """Graph JSON violates the version-1 structural contract."""


class UnknownBlockType(JdspError):
    pass


class UnknownParam(JdspError):
    pass


class ParamOutOfBounds(JdspError):
    pass


class DanglingWire(JdspError):
    pass


class KindMismatch(JdspError):
    pass


class DuplicateInputWire(JdspError):
    pass


class CycleDetected(JdspError):
    def __init__(self, cycle_ids):
        self.cycle_ids = list(cycle_ids)
        super().__init__(f"graph contains a cycle: {' -> '.join(self.cycle_ids)}")


class MissingInput(JdspError):
    pass


class UnknownOutput(JdspError):
    pass


class BlockRuntimeError(JdspError):
    """A block failed during execution; wraps the causing error."""

    def __init__(self, block_id: str, cause: BaseException):
        self.block_id = block_id
        self.cause = cause
        super().__init__(f"block '{block_id}' failed: {cause}")


# --- numeric / signal operations -----------------------------------------

class InvalidSpec(JdspError):
    pass


class InvalidLength(JdspError):
    pass


class InvalidLag(JdspError):
    pass


class InvalidFactor(JdspError):
    pass


class LengthMismatch(JdspError):
    pass


class EmptyInput(JdspError):
    pass


class NotPowerOfTwo(JdspError):
    pass


class DivisionNearZero(JdspError):
    pass


class NoConvergence(JdspError):
    """Iteration cap hit; carries the last iterate for diagnosis."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class NonConjugateRoots(JdspError):
    pass


class NumericalFailure(JdspError):
    pass


class SingularError(JdspError):
    pass


# --- WAV / CSV I/O --------------------------------------------------------

class UnsupportedFormat(JdspError):
    pass


class CorruptHeader(JdspError):
    pass


class OutOfRange(JdspError):
    pass


# --- machine learning -----------------------------------------------------

class InvalidK(JdspError):
    pass


class EmptyData(JdspError):
    pass


class DimensionMismatch(JdspError):
    pass


class LabelOutOfRange(JdspError):
    pass


# --- quantum --------------------------------------------------------------

class ZeroSignal(JdspError):
    pass


class TooLong(JdspError):
    pass


class InvalidQubits(JdspError):
    pass


class InvalidShots(JdspError):
    pass


class ZeroReference(JdspError):
    pass


# --- service --------------------------------------------------------------

class ResourceLimit(JdspError):
    pass
