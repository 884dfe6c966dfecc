#!/usr/bin/env python3
"""
Analytic capacity of finite unions of real intervals.

For E a finite union of real intervals the capacity is |E|/4 and the
extremal (Ahlfors) function is tanh(phi_E / 4) with
phi_E(z) = int_E dt / (z - t) = sum log((z - a_i) / (z - b_i)).

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from ..domain import SlitConfig
from ..exceptions import OnSet, OverlappingIntervals
from .forward_solver import CombSolution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntervalUnion:
    """Disjoint closed intervals [a_i, b_i], sorted left to right."""

    intervals: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        cleaned = tuple(sorted((float(a), float(b)) for a, b in self.intervals))
        for a, b in cleaned:
            if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
                raise OverlappingIntervals(f"interval [{a}, {b}] is empty or not finite")
        for (_, b0), (a1, _) in zip(cleaned, cleaned[1:]):
            if not b0 < a1:
                raise OverlappingIntervals(f"intervals ending at {b0} and starting at {a1} overlap")
        object.__setattr__(self, "intervals", cleaned)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "IntervalUnion":
        return cls(tuple((p[0], p[1]) for p in pairs))

    @classmethod
    def from_solution(cls, solution: CombSolution) -> "IntervalUnion":
        """The closed gaps of a solved comb."""
        gaps = solution.gaps
        return cls(tuple(zip(gaps.z_minus, gaps.z_plus)))

    @property
    def starts(self) -> np.ndarray:
        return np.array([a for a, _ in self.intervals], dtype=float)

    @property
    def ends(self) -> np.ndarray:
        return np.array([b for _, b in self.intervals], dtype=float)

    def contains(self, z) -> np.ndarray:
        z_arr = np.asarray(z, dtype=complex)
        x = z_arr.real[..., None]
        inside = (x >= self.starts) & (x <= self.ends)
        return (z_arr.imag == 0) & inside.any(axis=-1)


def total_length(union: IntervalUnion) -> float:
    return float(np.sum(union.ends - union.starts))


def capacity(union: IntervalUnion) -> float:
    """Analytic capacity |E|/4 of a real compact."""
    return total_length(union) / 4.0


def phi(union: IntervalUnion, z) -> np.ndarray:
    """phi_E(z) = sum log((z - a_i)/(z - b_i)), continuous off E and vanishing at infinity."""
    z_arr = np.asarray(z, dtype=complex)
    if not union.intervals:
        return np.zeros_like(z_arr)
    if np.any(union.contains(z_arr)):
        raise OnSet("phi is undefined on the set")
    z3 = z_arr[..., None]
    # log1p keeps precision far from the set where the ratio is close to 1
    values = np.log1p((union.ends - union.starts) / (z3 - union.ends)).sum(axis=-1)
    return values


def ahlfors(union: IntervalUnion, z) -> np.ndarray:
    """f_E = (exp(phi/2) - 1) / (exp(phi/2) + 1) = tanh(phi/4)."""
    return np.tanh(phi(union, z) / 4.0)


def derivative_at_infinity(union: IntervalUnion, radius: float = 1e6) -> float:
    """lim z f_E(z) by Richardson extrapolation in 1/z along the positive real axis."""
    if not union.intervals:
        return 0.0
    centre = 0.5 * (union.starts[0] + union.ends[-1])
    scale = max(1.0, float(union.ends[-1] - union.starts[0]))
    r = radius * scale
    points = np.array([centre + r, centre + 2.0 * r], dtype=complex)
    values = (points - centre) * ahlfors(union, points)
    return float((2.0 * values[1] - values[0]).real)


def max_modulus(union: IntervalUnion, samples: int = 200) -> float:
    """Largest |f_E| over a deterministic sample hugging the set and the surrounding plane."""
    if not union.intervals:
        return 0.0
    lo, hi = float(union.starts[0]), float(union.ends[-1])
    width = hi - lo
    xs = np.linspace(lo - 0.5 * width, hi + 0.5 * width, samples)
    offsets = width * np.array([1e-9, 1e-6, 1e-3, 0.1, 1.0])
    grid = (xs[:, None] + 1j * offsets[None, :]).ravel()
    grid = np.concatenate([grid, np.conj(grid)])
    ring = lo + 0.5 * width + 2.0 * width * np.exp(2j * np.pi * np.arange(samples) / samples)
    points = np.concatenate([grid, ring])
    return float(np.max(np.abs(ahlfors(union, points))))


def slit_diameter(config: SlitConfig) -> float:
    """Diameter of the union of slits [u_n - i h_n, u_n + i h_n] with h_n > 0."""
    idx = [n for n, height in enumerate(config.h) if height > 0]
    if not idx:
        return 0.0
    u = config.positions[idx]
    h = config.heights[idx]
    spread = np.hypot(u[:, None] - u[None, :], h[:, None] + h[None, :])
    return float(spread.max())


@dataclass
class CapacityReport:
    """Capacity of the slit union Gamma(h) read off the gap lengths."""

    l1: float
    capacity: float
    diameter: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def slit_union_capacity_check(solution: CombSolution) -> CapacityReport:
    """Check |l|_1 / 4 <= diam Gamma(h); both capacity readings are logged."""
    lengths: List[float] = [b - a for a, b in zip(solution.gaps.z_minus, solution.gaps.z_plus)]
    l1 = float(sum(lengths))
    cap = l1 / 4.0
    diameter = slit_diameter(solution.config)
    passed = cap <= diameter + 1e-9 * max(1.0, diameter)
    logger.info(
        f"Slit union {solution.config.fingerprint()}: |l|_1={l1:.12g} "
        f"(capacity read as |l|_1/4={cap:.12g}), diameter={diameter:.12g}"
    )
    return CapacityReport(l1, cap, diameter, passed)
