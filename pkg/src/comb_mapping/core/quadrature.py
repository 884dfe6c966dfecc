#!/usr/bin/env python3
"""
Composite Gauss-Legendre rules with geometric grading toward interval ends.

All rules live on [0, 1] and are cached; callers map them affinely.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Tuple

import numpy as np

Rule = Tuple[np.ndarray, np.ndarray]

GRADE_BOTH = "both"
GRADE_LEFT = "left"
GRADE_RIGHT = "right"
GRADE_NONE = "none"


@dataclass(frozen=True)
class QuadratureSettings:
    """Node counts and tolerances shared by every quadrature in the package."""

    nodes_per_panel: int = 16
    grading_ratio: float = 0.25
    max_levels: int = 40
    tail_nodes: int = 16
    closure_tol: float = 1e-11
    identity_tol: float = 1e-8
    inversion_tol: float = 1e-11

    def refined(self) -> "QuadratureSettings":
        """The same settings with twice as many nodes per panel."""
        return replace(
            self, nodes_per_panel=2 * self.nodes_per_panel, tail_nodes=2 * self.tail_nodes
        )


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> Rule:
    """n-point Gauss-Legendre rule mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * (x + 1.0)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=None)
def _breakpoints(levels: int, ratio: float, grade: str) -> np.ndarray:
    if grade == GRADE_NONE:
        return np.array([0.0, 0.5, 1.0])
    if grade == GRADE_BOTH:
        left = 0.25 * ratio ** np.arange(levels, 0, -1)
        inner = np.array([0.0, *left, 0.25, 0.75])
        return np.concatenate([inner, 1.0 - left[::-1], [1.0]])
    left = 0.5 * ratio ** np.arange(levels, 0, -1)
    points = np.array([0.0, *left, 0.5, 1.0])
    if grade == GRADE_RIGHT:
        points = (1.0 - points)[::-1]
    return points


@lru_cache(maxsize=256)
def graded_rule(levels: int, ratio: float, nodes_per_panel: int, grade: str = GRADE_BOTH) -> Rule:
    """Composite rule on [0, 1] whose panels shrink by `ratio` toward the graded end(s)."""
    breaks = _breakpoints(levels, ratio, grade)
    t, w = gauss_legendre(nodes_per_panel)
    widths = np.diff(breaks)
    nodes = (breaks[:-1, None] + widths[:, None] * t[None, :]).ravel()
    weights = (widths[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=64)
def panel_rule(panels: int, nodes_per_panel: int) -> Rule:
    """Uniform composite rule on [0, 1]."""
    breaks = np.linspace(0.0, 1.0, panels + 1)
    t, w = gauss_legendre(nodes_per_panel)
    widths = np.diff(breaks)
    nodes = (breaks[:-1, None] + widths[:, None] * t[None, :]).ravel()
    weights = (widths[:, None] * w[None, :]).ravel()
    return nodes, weights


def grading_levels(distance: float, base: float, ratio: float, max_levels: int) -> int:
    """Levels needed so the smallest end panel is no wider than `distance`.

    `distance` is how far the nearest off-interval singularity sits from the
    graded end, in the same units as `base` (the width of the ungraded end panel).
    """
    if not distance > 0:
        return max_levels
    if distance >= base:
        return 1
    levels = math.ceil(math.log(distance / base) / math.log(ratio)) + 1
    return int(min(max(levels, 1), max_levels))


def angular_distance(gap: float, half_length: float) -> np.ndarray:
    """Distance, in the cos-substitution angle, from an interval end to a point `gap` beyond it."""
    return np.arccosh(1.0 + np.asarray(gap, dtype=float) / np.asarray(half_length, dtype=float))
