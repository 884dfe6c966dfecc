#!/usr/bin/env python3
"""
comb-mapping package.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

from .__version__ import __version__
from .core import CombSolution, Quasimomentum, compute_quantities, solve_forward
from .domain import GapSystem, NormSpec, QuantityReport, SlitConfig, validate
from .exceptions import CombMapError, InputError, MonotonicityViolation, NumericalError

__all__ = [
    "CombMapError",
    "CombSolution",
    "GapSystem",
    "InputError",
    "MonotonicityViolation",
    "NormSpec",
    "NumericalError",
    "QuantityReport",
    "Quasimomentum",
    "SlitConfig",
    "__version__",
    "compute_quantities",
    "solve_forward",
    "validate",
]
