#!/usr/bin/env python3
"""
Seeded random ensembles of slit configurations, solved and checked concurrently.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.forward_solver import ForwardSolver, SolverOptions, lindelof_pair_check
from ..core.quadrature import QuadratureSettings
from ..domain import SlitConfig
from ..exceptions import CombMapError, InvalidOptions
from .checks import WEIGHT_RULES, CheckPlan, CheckResult, lindelof_results, run_checks

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for a reproducible ensemble; every draw derives from `seed`."""

    seed: int = 42
    count: int = 200
    min_size: int = 1
    max_size: int = 8
    spacing: Tuple[float, float] = (1.0, 3.0)
    heights: Tuple[float, float] = (0.0, 2.0)
    empty_fraction: float = 0.1
    weight_rules: Tuple[str, ...] = WEIGHT_RULES
    p_values: Tuple[float, ...] = (1.0, 1.5, 2.0, 3.0)
    lindelof_pairs: int = 20
    filters: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.count < 0:
            raise InvalidOptions(f"ensemble count {self.count} is negative")
        if not 1 <= self.min_size <= self.max_size:
            raise InvalidOptions(f"size range [{self.min_size}, {self.max_size}] is empty")
        lo, hi = self.spacing
        if not 1.0 <= lo <= hi:
            raise InvalidOptions(f"spacing range [{lo}, {hi}] must start at 1 or above")
        h_lo, h_hi = self.heights
        if not 0.0 <= h_lo <= h_hi:
            raise InvalidOptions(f"height range [{h_lo}, {h_hi}] is invalid")
        if not 0.0 <= self.empty_fraction < 1.0:
            raise InvalidOptions(f"empty fraction {self.empty_fraction} outside [0, 1)")
        if self.lindelof_pairs < 0:
            raise InvalidOptions("number of Lindelof pairs is negative")

    @classmethod
    def small_slits(cls, seed: int = 42, count: int = 50) -> "EnsembleSpec":
        """Unit spacing and heights up to 0.2, where the local estimates apply."""
        return cls(
            seed=seed,
            count=count,
            min_size=2,
            spacing=(1.0, 1.0),
            heights=(0.0, 0.2),
            empty_fraction=0.0,
            lindelof_pairs=0,
            filters=("3.10", "3.11", "3.12"),
        )

    @property
    def plan(self) -> CheckPlan:
        return CheckPlan(self.p_values, self.weight_rules, self.filters)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["spacing"] = list(self.spacing)
        data["heights"] = list(self.heights)
        data["weight_rules"] = list(self.weight_rules)
        data["p_values"] = list(self.p_values)
        data["filters"] = list(self.filters)
        return data


def sample_config(spec: EnsembleSpec, rng: np.random.Generator) -> SlitConfig:
    """One random configuration: u_1 = 1, spacings and heights drawn uniformly."""
    size = int(rng.integers(spec.min_size, spec.max_size + 1))
    steps = rng.uniform(spec.spacing[0], spec.spacing[1], size - 1)
    u = 1.0 + np.concatenate([[0.0], np.cumsum(steps)])
    h = rng.uniform(spec.heights[0], spec.heights[1], size)
    h = np.where(rng.random(size) < spec.empty_fraction, 0.0, h)
    return SlitConfig(tuple(u), tuple(h))


def monotone_pair(spec: EnsembleSpec, rng: np.random.Generator) -> Tuple[SlitConfig, SlitConfig]:
    """(small, big) on shared positions; each height is kept or shrunk by a uniform factor."""
    big = sample_config(spec, rng)
    heights = big.heights
    keep = rng.random(big.size) < 0.5
    shrink = rng.random(big.size)
    small = SlitConfig(big.u, tuple(np.where(keep, heights, heights * shrink)))
    return small, big


@dataclass
class InstanceOutcome:
    """Results of one ensemble member, or the error that stopped it."""

    index: int
    kind: str
    context: str
    results: List[CheckResult] = field(default_factory=list)
    error: Optional[str] = None
    exit_code: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "kind": self.kind,
            "instance": self.context,
            "error": self.error,
            "exitCode": self.exit_code,
        }


@dataclass
class EnsembleReport:
    """Ordered aggregate of every instance outcome."""

    spec: EnsembleSpec
    outcomes: List[InstanceOutcome] = field(default_factory=list)

    @property
    def results(self) -> List[CheckResult]:
        return [r for outcome in self.outcomes for r in outcome.results]

    @property
    def violations(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    @property
    def errors(self) -> List[InstanceOutcome]:
        return [o for o in self.outcomes if o.error is not None]

    @property
    def exit_code(self) -> int:
        if self.violations:
            return 1
        if self.errors:
            return max(o.exit_code for o in self.errors)
        return 0

    def summary(self) -> Dict[str, Any]:
        results = self.results
        return {
            "seed": self.spec.seed,
            "instances": self.spec.count,
            "pairs": self.spec.lindelof_pairs,
            "checks": len(results),
            "applicable": sum(1 for r in results if r.applicable),
            "violations": len(self.violations),
            "errors": len(self.errors),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "summary": self.summary(),
            "results": [r.to_dict() for r in self.results],
            "errors": [o.to_dict() for o in self.errors],
        }


def _check_instance(
    index: int,
    config: SlitConfig,
    plan: CheckPlan,
    options: SolverOptions,
    settings: QuadratureSettings,
) -> InstanceOutcome:
    context = f"#{index} {config.fingerprint()}"
    try:
        solution = ForwardSolver(options, settings).solve(config)
        results = run_checks(solution, plan, options)
    except CombMapError as e:
        logger.warning(f"Instance {context} failed: {e}")
        return InstanceOutcome(index, "instance", context, error=str(e), exit_code=e.exit_code)
    tagged = [replace(r, context=context) for r in results]
    return InstanceOutcome(index, "instance", context, tagged)


def _check_pair(
    index: int,
    small: SlitConfig,
    big: SlitConfig,
    plan: CheckPlan,
    options: SolverOptions,
    settings: QuadratureSettings,
) -> InstanceOutcome:
    context = f"pair#{index} {big.fingerprint()}"
    try:
        report = lindelof_pair_check(
            small, big, options, settings, grid=10, raise_on_violation=False
        )
    except CombMapError as e:
        logger.warning(f"Lindelof pair {context} failed: {e}")
        return InstanceOutcome(index, "pair", context, error=str(e), exit_code=e.exit_code)
    return InstanceOutcome(index, "pair", context, plan.keep(lindelof_results(report, context)))


def run_ensemble(
    spec: EnsembleSpec,
    workers: int = 1,
    options: Optional[SolverOptions] = None,
    settings: Optional[QuadratureSettings] = None,
) -> EnsembleReport:
    """Solve and check every ensemble member; the report is ordered by instance index."""
    options = options or SolverOptions()
    settings = settings or QuadratureSettings()
    plan = spec.plan
    instance_root, pair_root = np.random.SeedSequence(spec.seed).spawn(2)

    configs = [
        sample_config(spec, np.random.default_rng(child))
        for child in instance_root.spawn(spec.count)
    ]
    run_pairs = spec.lindelof_pairs > 0 and plan.wants("lindelof")
    pairs = []
    if run_pairs:
        streams = pair_root.spawn(spec.lindelof_pairs)
        pairs = [monotone_pair(spec, np.random.default_rng(child)) for child in streams]

    logger.info(
        f"Running ensemble seed={spec.seed}: {len(configs)} instances, "
        f"{len(pairs)} Lindelof pairs on {workers} workers"
    )
    start = time.time()
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        futures = [
            executor.submit(_check_instance, i, config, plan, options, settings)
            for i, config in enumerate(configs)
        ]
        futures += [
            executor.submit(_check_pair, i, small, big, plan, options, settings)
            for i, (small, big) in enumerate(pairs)
        ]
        # ordered reduce keeps the report independent of scheduling
        outcomes = [future.result() for future in futures]

    report = EnsembleReport(spec, outcomes)
    logger.info(
        f"Ensemble seed={spec.seed} finished in {time.time() - start:.1f}s: "
        f"{len(report.violations)} violations, {len(report.errors)} errors"
    )
    return report


__all__ = [
    "EnsembleReport",
    "EnsembleSpec",
    "InstanceOutcome",
    "monotone_pair",
    "run_ensemble",
    "sample_config",
]
