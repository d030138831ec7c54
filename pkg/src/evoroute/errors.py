"""Exception hierarchy. Every error raised by this package derives from EvoRouteError."""

from __future__ import annotations


class EvoRouteError(Exception):
    """Base class for all package errors."""


class InvalidRecord(EvoRouteError):
    """A step record violates one of its invariants."""


class DuplicateRecordId(EvoRouteError):
    pass


class EpisodeMismatch(EvoRouteError):
    """A trajectory commit mixes episode ids or has non-contiguous step indices."""


class CorruptLine(EvoRouteError):
    """A persisted knowledge-base line failed to parse or validate."""

    def __init__(self, line_number: int, reason: str = "") -> None:
        self.line_number = line_number
        msg = f"corrupt line {line_number}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class UnsupportedSchemaVersion(EvoRouteError):
    pass


class DimensionMismatch(EvoRouteError):
    pass


class RemoteUnavailable(EvoRouteError):
    """The remote embedding service could not be reached or answered with an error."""


class FallbackUnavailable(EvoRouteError):
    """The stage-2 tool predictor failed; callers treat this as an empty prediction."""


class EmptyCandidateSet(EvoRouteError):
    pass


class EmptySamples(EvoRouteError):
    pass


class EmptyInput(EvoRouteError):
    pass


class UnknownDecision(EvoRouteError):
    pass


class DuplicateStepOutcome(EvoRouteError):
    pass


class IncompleteBuffer(EvoRouteError):
    """A trajectory commit was attempted while step outcomes are still missing."""

    def __init__(self, missing: list[str]) -> None:
        self.missing = list(missing)
        super().__init__(f"missing outcomes for decisions: {', '.join(self.missing)}")


class InvalidPerformance(EvoRouteError):
    pass


class WrongPhase(EvoRouteError):
    pass


class UnknownRole(EvoRouteError):
    pass


class InvalidGeneratorConfig(EvoRouteError):
    pass


class InvalidConfig(EvoRouteError):
    """A config file is malformed or holds out-of-range values."""
