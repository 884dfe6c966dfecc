#!/usr/bin/env python3
"""
Derived quantities of a solved comb, one entry per slit.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import logging
import math
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from ..domain import QuantityReport
from .forward_solver import CombSolution

logger = logging.getLogger(__name__)


def band_points(solution: CombSolution) -> List[Tuple[float, float]]:
    """Gaps plus the real images z(u_m) of empty slits as zero-length gaps, left to right."""
    q = solution.quasimomentum
    pieces = [(a, b) for a, b in zip(solution.gaps.z_minus, solution.gaps.z_plus)]
    for slit in range(solution.config.size):
        if solution.gap_of(slit) is None:
            x = q.band_preimage(solution.config.u[slit])
            pieces.append((x, x))
    return sorted(pieces)


def minimal_band(solution: CombSolution) -> Optional[float]:
    """Shortest bounded band; None without gaps or with a single slit."""
    if solution.gaps.count == 0 or solution.config.size < 2:
        return None
    pieces = band_points(solution)
    bands = [pieces[i + 1][0] - pieces[i][1] for i in range(len(pieces) - 1)]
    return float(min(bands))


@lru_cache(maxsize=256)
def compute_quantities(solution: CombSolution) -> QuantityReport:
    """Every per-slit and global quantity of a solved comb."""
    config = solution.config
    q = solution.quasimomentum
    size = config.size
    zeros = [0.0] * size
    l, h_comp, A, J = list(zeros), list(zeros), list(zeros), list(zeros)
    mu_plus, mu_minus, nu, L = list(zeros), list(zeros), list(zeros), list(zeros)
    u_comp = list(config.u)

    if solution.gaps.count:
        positions, heights = q.heights_and_positions()
        for gap, slit in enumerate(solution.active):
            l[slit] = solution.gaps.z_plus[gap] - solution.gaps.z_minus[gap]
            u_comp[slit] = float(positions[gap])
            h_comp[slit] = float(heights[gap])
            A[slit] = q.action(gap)
            J[slit] = q.sqrt_action(gap)
            minus, plus = q.effective_masses(gap)
            mu_plus[slit], mu_minus[slit] = plus, abs(minus)
            nu[slit] = q.tip_mass(gap)
            L[slit] = q.invariant_length(gap)

    q0, dirichlet = q.q0_and_dirichlet()
    report = QuantityReport(
        u=list(config.u),
        h=list(config.h),
        l=l,
        h_computed=h_comp,
        u_computed=u_comp,
        A=A,
        J=J,
        mu_plus=mu_plus,
        mu_minus=mu_minus,
        nu=nu,
        L=L,
        e=[x / (4.0 * math.pi) for x in l],
        d=[x / 4.0 for x in A],
        Q0=q0,
        ID=dirichlet,
        S=2.0 * math.pi * q0,
        s=minimal_band(solution),
        u_star=config.u_star,
        band_lengths=[float(x) for x in np.asarray(solution.gaps.band_lengths)],
    )
    logger.debug(f"Quantities for {config.fingerprint()}: Q0={q0:.12g}, ID={dirichlet:.12g}")
    return report
