#!/usr/bin/env python3
"""
Worked configurations whose gap data can be compared with closed-form chains.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.closed_forms import uniform_comb_gap_length
from ..core.forward_solver import CombSolution, SolverOptions, solve_forward
from ..core.quadrature import QuadratureSettings
from ..core.quantities import compute_quantities
from ..domain import SlitConfig, lp_norm
from ..exceptions import InvalidOptions
from .checks import CheckResult

logger = logging.getLogger(__name__)

EXAMPLE_IDS = (1, 2, 3)
MAX_SIZE = {1: 8, 2: 8, 3: 50}


def example_config(example_id: int, size: int, height: float = 1.0) -> SlitConfig:
    """The slit configuration of worked example `example_id` at truncation `size`."""
    if example_id not in EXAMPLE_IDS:
        raise InvalidOptions(f"example id must be one of {EXAMPLE_IDS}, got {example_id}")
    if size < 1 or size > MAX_SIZE[example_id]:
        raise InvalidOptions(
            f"example {example_id} takes sizes 1..{MAX_SIZE[example_id]}, got {size}"
        )
    if example_id == 1:
        u = tuple(float(n) for n in range(-size, size + 1))
        return SlitConfig(u, tuple(float(size) for _ in u))
    if example_id == 2:
        u = tuple(float(n) for n in range(-size, size + 1))
        return SlitConfig(u, tuple(float(size - abs(n)) for n in range(-size, size + 1)))
    if height < 0:
        raise InvalidOptions(f"height {height} is negative")
    centre = size // 2
    u = tuple(math.pi * (n - centre) for n in range(size))
    return SlitConfig(u, tuple(float(height) for _ in u))


@dataclass
class ExampleReport:
    """Chains evaluated on one worked example."""

    example_id: int
    size: int
    config: SlitConfig
    results: List[CheckResult] = field(default_factory=list)
    values: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "example": self.example_id,
            "size": self.size,
            "config": self.config.to_dict(),
            "values": dict(self.values),
            "results": [r.to_dict() for r in self.results],
            "passed": self.passed,
        }


def _central_gap_length(solution: CombSolution) -> float:
    centre = solution.config.size // 2
    gap = solution.gap_of(centre)
    if gap is None:
        return 0.0
    return solution.gaps.z_plus[gap] - solution.gaps.z_minus[gap]


def reproduce_example(
    example_id: int,
    size: int,
    height: float = 1.0,
    options: Optional[SolverOptions] = None,
    settings: Optional[QuadratureSettings] = None,
) -> ExampleReport:
    """Solve a worked example and evaluate its chains."""
    config = example_config(example_id, size, height)
    logger.info(f"Reproducing example {example_id} at size {size}: {config.fingerprint()}")
    solution = solve_forward(config, options, settings)
    quantities = compute_quantities(solution)
    ctx = config.fingerprint()
    report = ExampleReport(example_id, size, config)
    l = np.asarray(quantities.l)

    if example_id == 1:
        h_inf = float(size)
        report.values = {"I_D": quantities.ID, "Q0": quantities.Q0, "|l|_1": float(l.sum())}
        report.results = [
            CheckResult.compare("ex1", h_inf**2, quantities.ID, ctx, "N^2 <= I_D"),
            CheckResult.compare("ex1", quantities.ID, 16.0 * size**2, ctx, "I_D <= 16 N^2"),
            CheckResult.compare("2.29", h_inf**2, 2.0 * quantities.Q0, ctx),
            CheckResult.compare(
                "ex1", float(l.sum()), 16.0 * math.pi * size, ctx, "|l|_1 <= 16 pi N"
            ),
        ]
    elif example_id == 2:
        root = 8.0**0.25
        l1 = float(l.sum())
        l2_sq = lp_norm(l, 2.0) ** 2
        # per-gap bounds do not hold at the outer gaps, so they are reported only
        report.values = {
            "max l": float(l.max()),
            "8^(1/4) sqrt(N)": root * math.sqrt(size),
            "|l|_1": l1,
            "|l|^2": l2_sq,
            "8^(1/4) sqrt(N) |l|_1": root * math.sqrt(size) * l1,
        }
        report.results = [
            CheckResult.compare("ex2", l1, 8.0 * size, ctx, "sum l <= 8N"),
            CheckResult.compare(
                "ex2", l2_sq, 8.0 * root * size**1.5, ctx, "|l|^2 <= 8 8^(1/4) N^(3/2)"
            ),
        ]
    else:
        limit = uniform_comb_gap_length(height)
        central = _central_gap_length(solution)
        error = abs(central - limit)
        report.values = {"central l": central, "2 asin tanh H": limit, "error": error}
        report.results = [
            CheckResult.residual("ex3", central - limit, 1e-2, ctx, "central gap vs periodic limit")
        ]
    return report


@dataclass
class ConvergenceReport:
    """Central gap error of truncated uniform combs and the h/l growth of the periodic comb."""

    height: float
    limit: float
    sizes: List[int]
    central_lengths: List[float]
    errors: List[float]
    ratio_heights: List[float]
    height_ratios: List[float]

    @property
    def monotone(self) -> bool:
        return all(b <= a for a, b in zip(self.errors, self.errors[1:]))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "height": self.height,
            "limit": self.limit,
            "sizes": list(self.sizes),
            "central_lengths": list(self.central_lengths),
            "errors": list(self.errors),
            "monotone": self.monotone,
            "h_over_l": [list(pair) for pair in zip(self.ratio_heights, self.height_ratios)],
        }


def counterexample_convergence(
    sizes: Sequence[int] = (12, 25, 50),
    height: float = 1.0,
    ratio_heights: Sequence[float] = (1.0, 2.0, 4.0, 8.0, 16.0),
    options: Optional[SolverOptions] = None,
    settings: Optional[QuadratureSettings] = None,
) -> ConvergenceReport:
    """Track the central gap of u_n = pi n truncations toward 2 arcsin tanh H.

    The second half reports h/l = H / (2 arcsin tanh H), which grows without
    bound while l stays below pi.
    """
    limit = uniform_comb_gap_length(height)
    lengths: List[float] = []
    for size in sizes:
        solution = solve_forward(example_config(3, size, height), options, settings)
        lengths.append(_central_gap_length(solution))
        logger.debug(f"Uniform comb N={size}: central gap {lengths[-1]:.12g} vs {limit:.12g}")
    ratios: List[Tuple[float, float]] = [
        (float(H), H / uniform_comb_gap_length(H)) for H in ratio_heights if H > 0
    ]
    return ConvergenceReport(
        height=float(height),
        limit=limit,
        sizes=[int(s) for s in sizes],
        central_lengths=lengths,
        errors=[abs(x - limit) for x in lengths],
        ratio_heights=[H for H, _ in ratios],
        height_ratios=[r for _, r in ratios],
    )


__all__ = [
    "ConvergenceReport",
    "ExampleReport",
    "counterexample_convergence",
    "example_config",
    "reproduce_example",
]
