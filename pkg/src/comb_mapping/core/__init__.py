#!/usr/bin/env python3
"""
Numerical core of comb-mapping: quadrature, quasimomentum, forward solver,
closed forms and capacity.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

from .capacity import (
    CapacityReport,
    IntervalUnion,
    ahlfors,
    capacity,
    derivative_at_infinity,
    max_modulus,
    phi,
    slit_diameter,
    slit_union_capacity_check,
    total_length,
)
from .closed_forms import (
    ChristoffelSchwarzConstants,
    cs_constants,
    nesting_gap_bound,
    single_slit_map,
    single_slit_preimage,
    three_slit_nesting,
    uniform_comb_gap_length,
)
from .forward_solver import (
    CombSolution,
    ForwardSolver,
    LindelofReport,
    RoundTripReport,
    SolverOptions,
    lindelof_pair_check,
    round_trip_check,
    solve_forward,
)
from .quadrature import QuadratureSettings
from .quantities import compute_quantities, minimal_band
from .quasimomentum import GapGeometry, Quasimomentum, solve_critical_points

__all__ = [
    "CapacityReport",
    "ChristoffelSchwarzConstants",
    "CombSolution",
    "ForwardSolver",
    "GapGeometry",
    "IntervalUnion",
    "LindelofReport",
    "QuadratureSettings",
    "Quasimomentum",
    "RoundTripReport",
    "SolverOptions",
    "ahlfors",
    "capacity",
    "compute_quantities",
    "cs_constants",
    "derivative_at_infinity",
    "lindelof_pair_check",
    "max_modulus",
    "minimal_band",
    "nesting_gap_bound",
    "phi",
    "round_trip_check",
    "single_slit_map",
    "single_slit_preimage",
    "slit_diameter",
    "slit_union_capacity_check",
    "solve_critical_points",
    "solve_forward",
    "three_slit_nesting",
    "total_length",
    "uniform_comb_gap_length",
]
