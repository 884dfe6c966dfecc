#!/usr/bin/env python3
"""
Forward problem: find the gap system whose quasimomentum reproduces a
slit configuration (u_n, h_n).

Unknowns are the left end of the first gap plus logarithms of every gap and
band length, so interlacing survives any Newton step. Critical points are
eliminated through the closure conditions. Heights are switched on by a
global factor t in (0, 1].

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import logging
import math
from dataclasses import asdict, dataclass, field, fields
from functools import cached_property
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..domain import GapSystem, SlitConfig
from ..exceptions import (
    ContinuationExhausted,
    GapCollision,
    InputError,
    InvalidOptions,
    InvalidPair,
    MonotonicityViolation,
    NonConvergence,
    NumericalError,
)
from .quadrature import QuadratureSettings
from .quasimomentum import Quasimomentum, solve_critical_points

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and limits of the Newton continuation."""

    residual_tol: float = 1e-9
    max_newton_iters: int = 60
    continuation_steps: int = 8
    fd_step: float = 1e-7
    max_halvings: int = 10
    empty_threshold: float = 1e-13

    def __post_init__(self):
        for name in ("residual_tol", "fd_step", "empty_threshold"):
            if not getattr(self, name) > 0:
                raise InvalidOptions(f"{name} must be positive")
        for name in ("max_newton_iters", "continuation_steps", "max_halvings"):
            if int(getattr(self, name)) < 1:
                raise InvalidOptions(f"{name} must be at least 1")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SolverOptions":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidOptions(f"unknown solver options: {', '.join(unknown)}")
        return cls(**dict(data))

    def merged(self, data: Optional[Mapping[str, Any]]) -> "SolverOptions":
        """Copy with the given fields replaced."""
        if not data:
            return self
        return SolverOptions.from_dict({**asdict(self), **dict(data)})


@dataclass(frozen=True)
class CombSolution:
    """A slit configuration with the gap system solving it."""

    config: SlitConfig
    gaps: GapSystem
    residual: float
    iterations: int
    continuation_path: Tuple[Tuple[float, float], ...] = ()
    settings: QuadratureSettings = field(default_factory=QuadratureSettings)

    @cached_property
    def quasimomentum(self) -> Quasimomentum:
        return Quasimomentum(self.gaps, self.settings)

    @property
    def active(self) -> Tuple[int, ...]:
        """Slit index of every gap."""
        return tuple(self.gaps.slits or ())

    def gap_of(self, slit: int) -> Optional[int]:
        """Gap index of a slit, None for an empty slit."""
        try:
            return self.active.index(slit)
        except ValueError:
            return None

    def z_of_k(self, k) -> np.ndarray:
        return self.quasimomentum.z_of_k(k)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "gaps": self.gaps.to_dict(),
            "residual": self.residual,
            "iterations": self.iterations,
            "continuation_path": [list(p) for p in self.continuation_path],
        }


def _encode(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.concatenate([[a[0]], np.log(b - a), np.log(a[1:] - b[:-1])])


def _decode(y: np.ndarray, count: int) -> Tuple[np.ndarray, np.ndarray]:
    lengths = np.exp(y[1 : count + 1])
    bands = np.exp(y[count + 1 :])
    a = np.empty(count)
    b = np.empty(count)
    a[0] = y[0]
    b[0] = a[0] + lengths[0]
    for n in range(1, count):
        a[n] = b[n - 1] + bands[n - 1]
        b[n] = a[n] + lengths[n]
    return a, b


class _HeightContinuation:
    """State of one forward solve: targets, tolerances and the Newton iteration."""

    def __init__(
        self,
        positions: np.ndarray,
        heights: np.ndarray,
        active: Tuple[int, ...],
        options: SolverOptions,
        settings: QuadratureSettings,
        log: logging.Logger,
    ):
        self.u = positions
        self.h = heights
        self.active = active
        self.count = len(active)
        self.options = options
        self.settings = settings
        self.logger = log
        self.span = float(self.u[-1] - self.u[0] + 2.0 * self.h.max())

    def initial_guess(self, t: float) -> np.ndarray:
        return _encode(self.u - t * self.h, self.u + t * self.h)

    def tolerance(self, t: float) -> float:
        tol = self.options.residual_tol * max(1.0, float(self.h.max()))
        if t < 1.0:
            return max(tol, 1e-7 * self.span)
        return tol

    def run(self) -> Tuple[np.ndarray, float, int, List[Tuple[float, float]]]:
        opts = self.options
        base = 1.0 / opts.continuation_steps
        if self.count > 1:
            room = np.diff(self.u) / (self.h[:-1] + self.h[1:])
            base = min(base, 0.45 * float(room.min()))
        min_step = base / 2**opts.max_halvings

        accepted: List[Tuple[float, np.ndarray]] = []
        path: List[Tuple[float, float]] = []
        iterations = 0
        step = base
        target = base
        while True:
            guess = self.predict(accepted, target)
            y, norm, used, converged = self.newton(guess, target, self.tolerance(target))
            iterations += used
            if converged:
                accepted.append((target, y))
                path.append((target, norm))
                self.logger.debug(f"Continuation accepted t={target:.6f}, residual {norm:.2e}")
                if target >= 1.0:
                    return y, norm, iterations, path
                step = min(2.0 * step, base)
                target = min(1.0, target + step)
                continue
            step *= 0.5
            last_t = accepted[-1][0] if accepted else 0.0
            self.logger.debug(f"Newton failed at t={target:.6f}; halving step to {step:.3e}")
            if step < min_step:
                if target >= 1.0 and 1.0 - last_t <= 2.0 * min_step:
                    raise NonConvergence(
                        f"Newton stalls at full height with residual {norm:.3e}"
                    )
                raise ContinuationExhausted(
                    f"continuation stalled after t={last_t:.6f} (residual {norm:.3e})",
                    last_t=last_t,
                    path=path,
                )
            target = min(1.0, last_t + step)

    def predict(self, accepted: Sequence[Tuple[float, np.ndarray]], target: float) -> np.ndarray:
        if not accepted:
            return self.initial_guess(target)
        t1, y1 = accepted[-1]
        if len(accepted) == 1:
            # gap lengths grow linearly in t while the slits are small
            guess = y1.copy()
            guess[1 : self.count + 1] += math.log(target / t1)
            return guess
        t0, y0 = accepted[-2]
        return y1 + (y1 - y0) * (target - t1) / (t1 - t0)

    def evaluate(self, y: np.ndarray, t: float) -> np.ndarray:
        a, b = _decode(y, self.count)
        gaps = solve_critical_points(GapSystem(a, b, slits=self.active), self.settings)
        u, h = Quasimomentum(gaps, self.settings).heights_and_positions()
        return np.concatenate([u - self.u, h - t * self.h])

    def jacobian(self, y: np.ndarray, t: float, residual: np.ndarray) -> np.ndarray:
        size = y.size
        jac = np.empty((size, size))
        for j in range(size):
            delta = self.options.fd_step * max(1.0, abs(y[j]))
            shifted = y.copy()
            shifted[j] += delta
            jac[:, j] = (self.evaluate(shifted, t) - residual) / delta
        return jac

    def step_limit(self, step: np.ndarray) -> float:
        """Largest damping keeping log-length changes below 2 and the shift below the span."""
        logs = float(np.max(np.abs(step[1:]), initial=0.0))
        limit = 1.0
        if logs > 2.0:
            limit = 2.0 / logs
        if abs(step[0]) * limit > self.span:
            limit = self.span / abs(step[0])
        return limit

    def newton(self, y: np.ndarray, t: float, tol: float) -> Tuple[np.ndarray, float, int, bool]:
        try:
            residual = self.evaluate(y, t)
        except (NumericalError, InputError) as exc:
            self.logger.debug(f"Predictor rejected at t={t:.6f}: {exc}")
            return y, math.inf, 0, False
        norm = float(np.max(np.abs(residual)))
        jac: Optional[np.ndarray] = None
        fresh = False
        for it in range(1, self.options.max_newton_iters + 1):
            if norm <= tol:
                return y, norm, it - 1, True
            if jac is None:
                jac = self.jacobian(y, t, residual)
                fresh = True
            try:
                step = linalg.solve(jac, -residual)
            except linalg.LinAlgError:
                return y, norm, it, False
            damping = self.step_limit(step)
            trial_norm = math.inf
            while damping > 1e-6:
                trial = y + damping * step
                try:
                    trial_residual = self.evaluate(trial, t)
                except (NumericalError, InputError):
                    damping *= 0.5
                    continue
                trial_norm = float(np.max(np.abs(trial_residual)))
                if trial_norm < norm:
                    break
                damping *= 0.5
            if not trial_norm < norm:
                if fresh:
                    return y, norm, it, False
                jac = None
                continue
            if trial_norm > 0.5 * norm:
                jac = None
            else:
                fresh = False
            y, residual, norm = trial, trial_residual, trial_norm
        return y, norm, self.options.max_newton_iters, norm <= tol


class ForwardSolver:
    """Newton continuation in the global height factor."""

    def __init__(
        self,
        options: Optional[SolverOptions] = None,
        settings: Optional[QuadratureSettings] = None,
    ):
        self.options = options or SolverOptions()
        self.settings = settings or QuadratureSettings()
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def active_slits(self, config: SlitConfig) -> List[int]:
        """Slits tall enough to open a gap."""
        top = config.max_height
        if top <= 0:
            return []
        floor = self.options.empty_threshold * top
        return [n for n, height in enumerate(config.h) if height > floor]

    def solve(self, config: SlitConfig) -> CombSolution:
        active = tuple(self.active_slits(config))
        if not active:
            self.logger.info(f"No nonempty slits in {config.fingerprint()}; identity map")
            empty = GapSystem((), (), (), ())
            return CombSolution(config, empty, 0.0, 0, ((1.0, 0.0),), self.settings)

        index = list(active)
        problem = _HeightContinuation(
            config.positions[index],
            config.heights[index],
            active,
            self.options,
            self.settings,
            self.logger,
        )
        y, residual, iterations, path = problem.run()
        a, b = _decode(y, problem.count)
        bands = a[1:] - b[:-1]
        if bands.size and bands.min() < 1e-12 * problem.span:
            raise GapCollision(f"band of length {bands.min():.3e} between neighbouring gaps")
        gaps = solve_critical_points(GapSystem(a, b, slits=active), self.settings)
        self.logger.info(
            f"Solved {config.fingerprint()} with residual {residual:.2e} "
            f"in {iterations} Newton iterations over {len(path)} continuation steps"
        )
        return CombSolution(config, gaps, residual, iterations, tuple(path), self.settings)


def solve_forward(
    config: SlitConfig,
    options: Optional[SolverOptions] = None,
    settings: Optional[QuadratureSettings] = None,
) -> CombSolution:
    """Solve the direct problem for a validated slit configuration."""
    return ForwardSolver(options, settings).solve(config)


@dataclass
class RoundTripReport:
    """Deviation of recomputed (u, h) from the configuration, per slit."""

    u_deviation: List[float]
    h_deviation: List[float]
    closure_residual: float
    nodes_per_panel: int

    @property
    def max_deviation(self) -> float:
        return max(self.u_deviation + self.h_deviation, default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["max_deviation"] = self.max_deviation
        return data


def round_trip_check(solution: CombSolution) -> RoundTripReport:
    """Recompute (u, h) from the gaps with doubled quadrature nodes."""
    settings = solution.settings.refined()
    config = solution.config
    u_dev = [0.0] * config.size
    h_dev = [0.0] * config.size
    closure = 0.0
    if solution.gaps.count:
        q = Quasimomentum(solution.gaps, settings)
        u, h = q.heights_and_positions()
        for gap, slit in enumerate(solution.active):
            u_dev[slit] = abs(float(u[gap]) - config.u[slit])
            h_dev[slit] = abs(float(h[gap]) - config.h[slit])
        closure = float(np.max(np.abs(q.closure_residuals())))
    report = RoundTripReport(u_dev, h_dev, closure, settings.nodes_per_panel)
    logger.debug(f"Round trip for {config.fingerprint()}: max deviation {report.max_deviation:.2e}")
    return report


@dataclass
class LindelofReport:
    """Monotonicity of Q0, gap lengths and Im z between two height-ordered solutions."""

    q0_small: float
    q0_big: float
    strict_required: bool
    kept_slits: List[int]
    l_small: List[float]
    l_big: List[float]
    y_margin: float
    grid_points: int
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["passed"] = self.passed
        return data


def _gap_lengths(solution: CombSolution) -> np.ndarray:
    lengths = np.zeros(solution.config.size)
    for gap, slit in enumerate(solution.active):
        lengths[slit] = solution.gaps.z_plus[gap] - solution.gaps.z_minus[gap]
    return lengths


def _sample_grid(config: SlitConfig, size: int) -> np.ndarray:
    """size x size points of K_+ above and between the slits, off every slit line."""
    u = config.positions
    pad = max(1.0, config.max_height)
    along = np.linspace(u[0] - pad, u[-1] + pad, size)
    # keep the grid columns off the slit lines
    spacing = config.u_star if config.size > 1 else 2.0 * pad
    clash = np.min(np.abs(along[:, None] - u[None, :]), axis=1) < 1e-3 * spacing
    along = np.where(clash, along + 0.05 * spacing, along)
    up = np.linspace(0.05, 2.0 * config.max_height + 1.0, size)
    return (along[:, None] + 1j * up[None, :]).ravel()


def lindelof_pair_check(
    small: SlitConfig,
    big: SlitConfig,
    options: Optional[SolverOptions] = None,
    settings: Optional[QuadratureSettings] = None,
    grid: int = 10,
    raise_on_violation: bool = True,
    solutions: Optional[Tuple[CombSolution, CombSolution]] = None,
) -> LindelofReport:
    """Compare solutions for heights small <= big on the same positions."""
    if small.u != big.u:
        raise InvalidPair("configurations must share slit positions")
    if any(s > b for s, b in zip(small.h, big.h)):
        raise InvalidPair("every height of the smaller configuration must not exceed the larger")

    if solutions is None:
        solver = ForwardSolver(options, settings)
        sol_small, sol_big = solver.solve(small), solver.solve(big)
    else:
        sol_small, sol_big = solutions

    q0_small = sol_small.quasimomentum.q0_and_dirichlet()[0]
    q0_big = sol_big.quasimomentum.q0_and_dirichlet()[0]
    strict = max(abs(b - s) for s, b in zip(small.h, big.h)) > 1e-6
    violations: List[str] = []
    if q0_small > q0_big + 1e-9 * max(1.0, q0_big):
        violations.append(f"2.26: Q0 {q0_small:.12g} exceeds {q0_big:.12g}")
    elif strict and not q0_small < q0_big:
        violations.append(f"2.26: Q0 not strictly smaller ({q0_small:.12g} vs {q0_big:.12g})")

    kept = [n for n in range(small.size) if small.h[n] == big.h[n] and big.h[n] > 0]
    l_small_all = _gap_lengths(sol_small)
    l_big_all = _gap_lengths(sol_big)
    l_small = [float(l_small_all[n]) for n in kept]
    l_big = [float(l_big_all[n]) for n in kept]
    for n, ls, lb in zip(kept, l_small, l_big):
        if ls < lb - 1e-8 * max(1.0, lb):
            violations.append(f"2.27: gap {n} length {ls:.12g} below {lb:.12g}")

    points = _sample_grid(big, grid)
    y_small = np.imag(sol_small.z_of_k(points))
    y_big = np.imag(sol_big.z_of_k(points))
    slack = 1e-8 * np.maximum(1.0, np.abs(y_big))
    margin = float(np.min(y_small - y_big + slack))
    if margin < 0:
        worst = int(np.argmin(y_small - y_big + slack))
        violations.append(f"2.23: Im z dominance fails at k={points[worst]:.6g}")

    report = LindelofReport(
        q0_small, q0_big, strict, kept, l_small, l_big, margin, points.size, violations
    )
    if violations:
        logger.warning(f"Lindelof check failed: {'; '.join(violations)}")
        if raise_on_violation:
            raise MonotonicityViolation("; ".join(violations))
    return report


__all__ = [
    "CombSolution",
    "ForwardSolver",
    "LindelofReport",
    "RoundTripReport",
    "SolverOptions",
    "lindelof_pair_check",
    "round_trip_check",
    "solve_forward",
]
