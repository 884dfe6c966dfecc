#!/usr/bin/env python3
"""
Core data types for comb mappings: slit configurations, gap systems,
weighted norms and the greedy height selection.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import (
    EmptyConfig,
    InvalidInterlacing,
    InvalidWeights,
    LengthMismatch,
    NegativeHeight,
    NonFiniteValue,
    NonIncreasingPositions,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SlitConfig:
    """Vertical slits [u_n - i h_n, u_n + i h_n] with strictly increasing u_n."""

    u: Tuple[float, ...]
    h: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(x) for x in self.u))
        object.__setattr__(self, "h", tuple(float(x) for x in self.h))
        if len(self.u) != len(self.h):
            raise LengthMismatch(f"u has {len(self.u)} entries but h has {len(self.h)}")
        if not self.u:
            raise EmptyConfig("a slit configuration needs at least one slit")
        if not all(math.isfinite(x) for x in self.u + self.h):
            raise NonFiniteValue("slit data must be finite")
        for n in range(len(self.u) - 1):
            if self.u[n + 1] <= self.u[n]:
                raise NonIncreasingPositions(
                    f"u[{n + 1}]={self.u[n + 1]} does not exceed u[{n}]={self.u[n]}"
                )
        for n, height in enumerate(self.h):
            if height < 0:
                raise NegativeHeight(f"h[{n}]={height} is negative")

    @property
    def size(self) -> int:
        return len(self.u)

    @property
    def positions(self) -> np.ndarray:
        return np.asarray(self.u, dtype=float)

    @property
    def heights(self) -> np.ndarray:
        return np.asarray(self.h, dtype=float)

    @property
    def u_star(self) -> float:
        """Minimal slit spacing; +inf for a single slit."""
        if self.size == 1:
            return math.inf
        return float(np.min(np.diff(self.positions)))

    @property
    def max_height(self) -> float:
        return max(self.h)

    @property
    def is_trivial(self) -> bool:
        return self.max_height == 0.0

    def scaled(self, t: float) -> "SlitConfig":
        """Same positions, heights multiplied by t."""
        return SlitConfig(self.u, tuple(t * x for x in self.h))

    def fingerprint(self) -> str:
        return f"N={self.size},u0={self.u[0]:.6g},hmax={self.max_height:.6g}"

    def to_dict(self) -> Dict[str, List[float]]:
        return {"u": list(self.u), "h": list(self.h)}


def validate(u: Sequence[float], h: Sequence[float]) -> SlitConfig:
    """Build a checked SlitConfig from raw vectors."""
    config = SlitConfig(tuple(u), tuple(h))
    logger.debug(f"Validated slit configuration {config.fingerprint()}, u_*={config.u_star}")
    return config


@dataclass(frozen=True)
class GapSystem:
    """Real gaps (z_minus_n, z_plus_n) with interior critical points c_n.

    `slits` maps each gap to the index of the slit it is the image of.
    `c` stays None until the critical points are solved for.
    """

    z_minus: Tuple[float, ...]
    z_plus: Tuple[float, ...]
    c: Optional[Tuple[float, ...]] = None
    slits: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "z_minus", tuple(float(x) for x in self.z_minus))
        object.__setattr__(self, "z_plus", tuple(float(x) for x in self.z_plus))
        if len(self.z_minus) != len(self.z_plus):
            raise LengthMismatch("z_minus and z_plus differ in length")
        if self.slits is None:
            object.__setattr__(self, "slits", tuple(range(len(self.z_minus))))
        else:
            object.__setattr__(self, "slits", tuple(int(n) for n in self.slits))
        if len(self.slits) != len(self.z_minus):
            raise LengthMismatch("slit index map does not match the number of gaps")
        for n, (a, b) in enumerate(zip(self.z_minus, self.z_plus)):
            if not (math.isfinite(a) and math.isfinite(b)):
                raise NonFiniteValue(f"gap {n} has a non-finite endpoint")
            if not a < b:
                raise InvalidInterlacing(f"gap {n} has endpoints {a} >= {b}")
            if n > 0 and not self.z_plus[n - 1] < a:
                raise InvalidInterlacing(f"gaps {n - 1} and {n} overlap or touch")
        if self.c is not None:
            object.__setattr__(self, "c", tuple(float(x) for x in self.c))
            if len(self.c) != len(self.z_minus):
                raise LengthMismatch("critical points do not match the number of gaps")
            for n, (a, cn, b) in enumerate(zip(self.z_minus, self.c, self.z_plus)):
                if not a < cn < b:
                    raise InvalidInterlacing(f"critical point {cn} outside gap {n} ({a}, {b})")

    @property
    def count(self) -> int:
        return len(self.z_minus)

    @property
    def lengths(self) -> np.ndarray:
        return np.asarray(self.z_plus) - np.asarray(self.z_minus)

    @property
    def band_lengths(self) -> np.ndarray:
        return np.asarray(self.z_minus[1:]) - np.asarray(self.z_plus[:-1])

    def with_critical_points(self, c: Sequence[float]) -> "GapSystem":
        return GapSystem(self.z_minus, self.z_plus, tuple(c), self.slits)

    def scaled(self, factor: float) -> "GapSystem":
        c = None if self.c is None else tuple(factor * x for x in self.c)
        return GapSystem(
            tuple(factor * x for x in self.z_minus),
            tuple(factor * x for x in self.z_plus),
            c,
            self.slits,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "z_minus": list(self.z_minus),
            "c": None if self.c is None else list(self.c),
            "z_plus": list(self.z_plus),
            "slits": list(self.slits),
        }


@dataclass(frozen=True)
class NormSpec:
    """Exponent p in [1, inf] and weights w_n >= 1; weights=None means unit weights."""

    p: float = 2.0
    weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not self.p >= 1:
            raise InvalidWeights(f"norm exponent p={self.p} must be at least 1")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
            bad = [w for w in self.weights if not w >= 1.0]
            if bad:
                raise InvalidWeights(f"weights must be >= 1, got {bad[0]}")

    @property
    def conjugate(self) -> float:
        """Hölder conjugate q with 1/p + 1/q = 1."""
        if self.p == 1:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)


def weighted_norm(seq: Sequence[float], spec: NormSpec) -> float:
    """(sum w_n |f_n|^p)^(1/p); the p = inf norm ignores the weights."""
    values = np.abs(np.asarray(seq, dtype=float))
    if spec.weights is not None and len(spec.weights) != values.size:
        raise LengthMismatch(
            f"sequence has {values.size} entries but {len(spec.weights)} weights were given"
        )
    if values.size == 0:
        return 0.0
    if math.isinf(spec.p):
        return float(values.max())
    weights = np.ones_like(values) if spec.weights is None else np.asarray(spec.weights)
    scale = values.max()
    if scale == 0.0:
        return 0.0
    # factor out the largest entry so high powers stay representable
    return float(scale * np.sum(weights * (values / scale) ** spec.p) ** (1.0 / spec.p))


def lp_norm(seq: Sequence[float], p: float) -> float:
    return weighted_norm(seq, NormSpec(p))


def greedy_tilde(config: SlitConfig) -> np.ndarray:
    """Greedy exclusion-window selection of dominant slits.

    Repeatedly pick the tallest remaining slit (smallest index on ties) among
    those lying strictly outside the windows |u - u_k| <= h_k of all slits
    picked so far.
    """
    u = config.positions
    h = config.heights
    selected: List[int] = []
    while True:
        candidates = [
            n
            for n in range(config.size)
            if h[n] > 0 and all(abs(u[n] - u[m]) > h[m] for m in selected)
        ]
        if not candidates:
            break
        best = max(candidates, key=lambda n: (h[n], -n))
        selected.append(best)
    tilde = np.zeros_like(h)
    tilde[selected] = h[selected]
    return tilde


def greedy_energy_bounds(config: SlitConfig) -> Tuple[float, float]:
    """Lower and upper bounds (|~h|^2/pi^2, 2 sqrt(2) |~h|^2/pi) for Q0."""
    energy = float(np.sum(greedy_tilde(config) ** 2))
    return energy / math.pi**2, 2.0 * math.sqrt(2.0) * energy / math.pi


@dataclass
class QuantityReport:
    """Per-slit derived quantities of a solved comb; empty slits carry zeros.

    Effective masses are stored as magnitudes; `mu_signs` gives the signs of
    (mu_minus, mu_plus).
    """

    u: List[float]
    h: List[float]
    l: List[float]
    h_computed: List[float]
    u_computed: List[float]
    A: List[float]
    J: List[float]
    mu_plus: List[float]
    mu_minus: List[float]
    nu: List[float]
    L: List[float]
    e: List[float]
    d: List[float]
    Q0: float
    ID: float
    S: float
    s: Optional[float]
    u_star: float
    band_lengths: List[float] = field(default_factory=list)
    mu_signs: Tuple[int, int] = (-1, 1)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["mu_signs"] = list(self.mu_signs)
        if math.isinf(self.u_star):
            data["u_star"] = None
        return data

    def rows(self) -> List[Dict[str, float]]:
        """One record per slit for tabular output."""
        return [
            {
                "n": n,
                "u": self.u[n],
                "h": self.h[n],
                "l": self.l[n],
                "A": self.A[n],
                "J": self.J[n],
                "mu+": self.mu_plus[n],
                "mu-": self.mu_minus[n],
                "nu": self.nu[n],
                "L": self.L[n],
                "e": self.e[n],
                "d": self.d[n],
            }
            for n in range(len(self.u))
        ]


__all__ = [
    "GapSystem",
    "NormSpec",
    "QuantityReport",
    "SlitConfig",
    "greedy_energy_bounds",
    "greedy_tilde",
    "lp_norm",
    "validate",
    "weighted_norm",
]
