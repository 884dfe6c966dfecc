#!/usr/bin/env python3
"""
Exception hierarchy for comb-mapping.

Every error carries the process exit code the CLI reports for it:
2 for bad input, 3 for numerical failure, 1 for a violated inequality.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

from typing import List, Optional, Sequence, Tuple


class CombMapError(Exception):
    """Base class for all comb-mapping errors."""

    exit_code = 3


class InputError(CombMapError):
    """The caller supplied data that violates a documented precondition."""

    exit_code = 2


class NumericalError(CombMapError):
    """A numerical procedure failed to reach its tolerance."""

    exit_code = 3


class MonotonicityViolation(CombMapError):
    """A monotonicity property failed beyond tolerance."""

    exit_code = 1


# Input errors


class NonIncreasingPositions(InputError):
    pass


class NonFiniteValue(InputError):
    """A position, height or gap endpoint is NaN or infinite."""


class NegativeHeight(InputError):
    pass


class EmptyConfig(InputError):
    pass


class LengthMismatch(InputError):
    pass


class InvalidWeights(InputError):
    pass


class InvalidInterlacing(InputError):
    pass


class OutOfGap(InputError):
    pass


class OnSlit(InputError):
    pass


class OnSet(InputError):
    pass


class OverlappingIntervals(InputError):
    pass


class EvaluationAtBranchPoint(InputError):
    pass


class InvalidOptions(InputError):
    pass


class MalformedInput(InputError):
    """An input file or argument could not be parsed."""


class InvalidPair(InputError):
    """Two configurations do not form a height-monotone pair on a shared grid."""


# Numerical errors


class NewtonDivergence(NumericalError):
    """Newton polishing did not reach tolerance; `trace` holds residual norms per step."""

    def __init__(self, message: str, trace: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.trace: List[float] = list(trace or [])


class QuadratureFailure(NumericalError):
    pass


class IdentityViolation(NumericalError):
    pass


class ContinuationExhausted(NumericalError):
    """Continuation stalled before t = 1."""

    def __init__(
        self,
        message: str,
        last_t: float = 0.0,
        path: Optional[Sequence[Tuple[float, float]]] = None,
    ):
        super().__init__(message)
        self.last_t = last_t
        self.path: List[Tuple[float, float]] = list(path or [])


class GapCollision(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class InversionFailure(NumericalError):
    pass
