#!/usr/bin/env python3
"""
Exact reference maps and constants.

Square roots follow one convention throughout: positive on the real axis to
the right of every singularity and continued through the upper half-plane.
Writing sqrt(w^2 + c^2) as w * sqrt(1 + c^2 / w^2) with the principal root
puts the branch cut exactly on the segment [-ic, ic].

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy import integrate, optimize, special

from ..domain import SlitConfig
from ..exceptions import NegativeHeight, NonConvergence, OnSet, OnSlit
from .forward_solver import CombSolution, SolverOptions, solve_forward
from .quadrature import QuadratureSettings

logger = logging.getLogger(__name__)


def single_slit_map(k, u0: float = 0.0, h: float = 1.0):
    """z(k) = u0 + sqrt((k - u0)^2 + h^2) for the slit [u0 - ih, u0 + ih]."""
    if h < 0:
        raise NegativeHeight(f"slit height {h} is negative")
    k_arr = np.asarray(k, dtype=complex)
    w = k_arr - u0
    if h == 0:
        return k_arr.copy() if k_arr.ndim else complex(k_arr)
    if np.any((w.real == 0) & (np.abs(w.imag) <= h)):
        raise OnSlit(f"point lies on the slit [{u0} - {h}i, {u0} + {h}i]")
    z = u0 + w * np.sqrt(1.0 + (h / w) ** 2)
    return z if k_arr.ndim else complex(z)


def single_slit_preimage(z, u0: float = 0.0, h: float = 1.0):
    """k(z) = u0 + sqrt((z - u0)^2 - h^2), the inverse of single_slit_map."""
    if h < 0:
        raise NegativeHeight(f"slit height {h} is negative")
    z_arr = np.asarray(z, dtype=complex)
    w = z_arr - u0
    if h == 0:
        return z_arr.copy() if z_arr.ndim else complex(z_arr)
    if np.any((w.imag == 0) & (np.abs(w.real) <= h)):
        raise OnSet(f"point lies on the gap [{u0 - h}, {u0 + h}]")
    k = u0 + w * np.sqrt(1.0 - (h / w) ** 2)
    return k if z_arr.ndim else complex(k)


def uniform_comb_gap_length(height: float) -> float:
    """Gap length 2 arcsin(tanh H) of the periodic comb u_n = pi n with equal heights H."""
    if height < 0:
        raise NegativeHeight(f"height {height} is negative")
    return 2.0 * math.asin(math.tanh(height))


def nesting_gap_bound(h0: float, tall: float) -> float:
    """Upper bound ((M^2 - h0^2 + 1)^2 + 4 h0^2)^(1/4) for the middle gap of the three-slit comb.

    Holds only while the middle slit is no taller than the outer ones (h0 <= M). For h0 > M
    the middle gap tends to 2 h0 as M shrinks, which exceeds the bound.
    """
    return ((tall**2 - h0**2 + 1.0) ** 2 + 4.0 * h0**2) ** 0.25


def nesting_outer_config(tall: float) -> SlitConfig:
    """Two slits of height M at +-1 with an empty slit at 0."""
    return SlitConfig((-1.0, 0.0, 1.0), (tall, 0.0, tall))


def nesting_config(h0: float, tall: float) -> SlitConfig:
    return SlitConfig((-1.0, 0.0, 1.0), (tall, h0, tall))


def three_slit_nesting(
    k,
    h0: float,
    tall: float,
    outer: Optional[CombSolution] = None,
    options: Optional[SolverOptions] = None,
    settings: Optional[QuadratureSettings] = None,
):
    """sqrt(z(k, eta)^2 + |z(i h0, eta)|^2) with eta the two outer slits of height M.

    The outer solution is solved on demand unless passed in.
    """
    if h0 < 0 or tall < 0:
        raise NegativeHeight("nesting heights must be nonnegative")
    if outer is None:
        outer = solve_forward(nesting_outer_config(tall), options, settings)
    inner = outer.z_of_k(np.asarray(k, dtype=complex))
    lift = abs(complex(outer.z_of_k(1j * h0))) if h0 > 0 else 0.0
    if lift == 0.0:
        return inner
    return single_slit_map(inner, 0.0, lift)


@dataclass(frozen=True)
class ChristoffelSchwarzConstants:
    """Images alpha < beta of u_*/2 and u_*/2 + i h_+ under the half-strip map."""

    alpha: float
    beta: float
    u_star: float
    h_plus: float
    residual: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _height_ratio(log_m: float) -> float:
    """(K(1 - m) - E(1 - m)) / E(m), the ratio h_+ / (u_*/2) at parameter m = alpha^2 / beta^2."""
    m = math.exp(log_m)
    return (special.ellipkm1(m) - special.ellipe(1.0 - m)) / special.ellipe(m)


def _integral_residual(alpha: float, beta: float, u_star: float, h_plus: float) -> float:
    first, _ = integrate.quad(
        lambda t: math.sqrt(beta**2 - t**2) / math.sqrt(alpha + t),
        0.0,
        alpha,
        weight="alg",
        wvar=(0.0, -0.5),
        epsabs=0.0,
        epsrel=1e-13,
    )
    second, _ = integrate.quad(
        lambda t: math.sqrt(beta + t) / math.sqrt(t + alpha),
        alpha,
        beta,
        weight="alg",
        wvar=(-0.5, 0.5),
        epsabs=0.0,
        epsrel=1e-13,
    )
    scale = max(1.0, u_star, h_plus)
    return max(abs(first - 0.5 * u_star), abs(second - h_plus)) / scale


def cs_constants(u_star: float, h_plus: float) -> ChristoffelSchwarzConstants:
    """Solve u_*/2 = beta E(m) and h_+ = beta (K(1 - m) - E(1 - m)) with m = (alpha / beta)^2."""
    if not (u_star > 0 and math.isfinite(u_star)):
        raise NonConvergence(f"u_* = {u_star} must be positive and finite")
    if h_plus < 0:
        raise NegativeHeight(f"h_+ = {h_plus} is negative")
    if h_plus == 0:
        return ChristoffelSchwarzConstants(0.5 * u_star, 0.5 * u_star, u_star, 0.0)

    target = 2.0 * h_plus / u_star
    lower = math.log(1e-300)
    if _height_ratio(lower) < target:
        raise NonConvergence(f"h_+/u_* = {h_plus / u_star:.3e} is beyond the representable range")
    log_m = optimize.brentq(lambda x: _height_ratio(x) - target, lower, 0.0, xtol=1e-15, rtol=1e-15)
    m = math.exp(log_m)
    beta = 0.5 * u_star / special.ellipe(m)
    alpha = beta * math.sqrt(m)
    residual = _integral_residual(alpha, beta, u_star, h_plus)
    if residual > 1e-10:
        raise NonConvergence(f"half-strip integrals off by {residual:.3e}")
    logger.debug(f"Half-strip constants for u_*={u_star}, h_+={h_plus}: alpha={alpha}, beta={beta}")
    return ChristoffelSchwarzConstants(alpha, beta, u_star, h_plus, residual)
