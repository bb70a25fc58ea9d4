"""Exception hierarchy.

Every error raised by the library derives from :class:`ChaosGraphError`.
Input problems derive from :class:`ValidationError` (CLI exit code 2),
numerical problems from :class:`NumericalError` (CLI exit code 3).
"""

from __future__ import annotations


class ChaosGraphError(Exception):
    exit_code = 1

    @property
    def name(self) -> str:
        return type(self).__name__


class ValidationError(ChaosGraphError, ValueError):
    exit_code = 2


class NumericalError(ChaosGraphError, ArithmeticError):
    exit_code = 3


class LoopEdge(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class IsolatedVertex(ValidationError):
    pass


class LabelOutOfRange(ValidationError):
    pass


class EmptySet(ValidationError):
    pass


class TooLargeForExact(ValidationError):
    pass


class InvalidK(ValidationError):
    pass


class SizeLimitExceeded(ValidationError):
    pass


class NonSymmetricCoefficients(ValidationError):
    pass


class DiagonalSupport(ValidationError):
    pass


class InvalidWeight(ValidationError):
    pass


class LayoutSizeMismatch(ValidationError):
    pass


class InvalidM(ValidationError):
    pass


class DisconnectedPartition(ValidationError):
    pass


class RowCollision(ValidationError):
    pass


class BlockSizeError(ValidationError):
    pass


class InvalidAlpha(ValidationError):
    pass


class WrongOrder(ValidationError):
    pass


class CapExceeded(ValidationError):
    pass


class InvalidDistribution(ValidationError):
    pass


class MemoryLimit(ValidationError):
    pass


class OverlappingBlocks(ValidationError):
    pass


class BlocksNotInVprime(ValidationError):
    pass


class BetaOutOfRange(ValidationError):
    pass


class FamilyTooSmall(ValidationError):
    pass


class InvalidEpsilon(ValidationError):
    pass


class SchemaError(ValidationError):
    pass


class SeedRequired(ValidationError):
    pass


class NumericalFailure(NumericalError):
    pass
