#!/usr/bin/env python3
"""
Quasimomentum of a finite gap system.

For gaps (a_n, b_n) with interior critical points c_n the derivative of the
quasimomentum is

    q(z) = prod (z - c_n) / prod sqrt((z - a_n)(z - b_n)),

positive on the band right of all gaps and continued through the upper
half-plane. Integrals over gaps and bands use the substitution
t = mid + half * cos(theta), which cancels the inverse square-root end
singularities, followed by graded Gauss-Legendre panels in theta.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import logging
import math
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, optimize

from ..domain import GapSystem
from ..exceptions import (
    EvaluationAtBranchPoint,
    IdentityViolation,
    InversionFailure,
    InvalidInterlacing,
    NewtonDivergence,
    NonConvergence,
    OnSlit,
    OutOfGap,
    QuadratureFailure,
)
from .quadrature import (
    GRADE_BOTH,
    GRADE_LEFT,
    QuadratureSettings,
    angular_distance,
    graded_rule,
    grading_levels,
    panel_rule,
)

logger = logging.getLogger(__name__)

_ARRAY = np.ndarray

# brentq rejects rtol below 4 * machine epsilon
BRENT_RTOL = 1e-15


def _brent(func, lo: float, hi: float, xtol: float) -> float:
    try:
        return float(optimize.brentq(func, lo, hi, xtol=xtol, rtol=BRENT_RTOL))
    except (ValueError, RuntimeError) as e:
        raise NonConvergence(f"root bracket [{lo:.12g}, {hi:.12g}] failed: {e}") from e


class GapGeometry:
    """Endpoint data of a gap system plus the angular rules fitted to it."""

    def __init__(
        self, z_minus: Sequence[float], z_plus: Sequence[float], settings: QuadratureSettings
    ):
        self.settings = settings
        self.a = np.asarray(z_minus, dtype=float)
        self.b = np.asarray(z_plus, dtype=float)
        self.count = self.a.size
        self.mid = 0.5 * (self.a + self.b)
        self.half = 0.5 * (self.b - self.a)
        self._own = np.eye(self.count, dtype=bool)[:, None, :]
        self.levels = self._gap_levels()
        self.theta, self.weights = self._angular_rule(self.levels)

    @property
    def span(self) -> float:
        return float(self.b[-1] - self.a[0]) if self.count else 0.0

    @property
    def bands(self) -> _ARRAY:
        return self.a[1:] - self.b[:-1]

    def _gap_levels(self) -> int:
        if self.count == 0:
            return 1
        bands = self.bands
        left = np.concatenate([[np.inf], bands])
        right = np.concatenate([bands, [np.inf]])
        eps = angular_distance(np.minimum(left, right), self.half)
        return grading_levels(
            float(np.min(eps)),
            math.pi / 4.0,
            self.settings.grading_ratio,
            self.settings.max_levels,
        )

    def _angular_rule(self, levels: int) -> Tuple[_ARRAY, _ARRAY]:
        t, w = graded_rule(
            levels, self.settings.grading_ratio, self.settings.nodes_per_panel, GRADE_BOTH
        )
        return math.pi * t, math.pi * w

    def gap_nodes(self) -> _ARRAY:
        """Real nodes t[n, k] = mid_n + half_n cos(theta_k)."""
        return self.mid[:, None] + self.half[:, None] * np.cos(self.theta)[None, :]

    def gap_factor(self, t: _ARRAY, roots: _ARRAY) -> _ARRAY:
        """prod_{m != n} |t - r_m| / sqrt(|t - a_m||t - b_m|) with row n of t inside gap n."""
        t3 = t[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(t3 - roots) / np.sqrt(np.abs(t3 - self.a) * np.abs(t3 - self.b))
        return np.where(self._own, 1.0, ratio).prod(axis=-1)

    def single_gap_factor(self, n: int, t: _ARRAY, roots: _ARRAY) -> _ARRAY:
        """Same product for gap n at arbitrary points t."""
        t = np.asarray(t, dtype=float)
        others = np.arange(self.count) != n
        t3 = t[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(t3 - roots[others]) / np.sqrt(
                np.abs(t3 - self.a[others]) * np.abs(t3 - self.b[others])
            )
        return ratio.prod(axis=-1)


def _closure_residuals(geometry: GapGeometry, c: _ARRAY) -> _ARRAY:
    """v(b_n) for every gap given candidate critical points c."""
    t = geometry.gap_nodes()
    factor = geometry.gap_factor(t, c)
    return ((c[:, None] - t) * factor) @ geometry.weights


def _moment_guess(geometry: GapGeometry) -> _ARRAY:
    """Critical points from the linear moment form of the closure conditions.

    Writing P(t) = prod (t - m_j) + sum_j alpha_j prod_{i != j} (t - m_i) with
    gap midpoints m_j turns the closure conditions into a linear system for
    alpha; each c_n is then the unique root of P inside gap n.
    """
    mid = geometry.mid
    t = geometry.gap_nodes()
    x = t - mid[:, None]
    rho = geometry.gap_factor(t, mid)
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = x[:, :, None] / (t[:, :, None] - mid[None, None, :])
    ratio = np.where(geometry._own, 1.0, raw)
    matrix = np.einsum("nk,nkj,k->nj", rho, ratio, geometry.weights)
    rhs = -(rho * x) @ geometry.weights
    alpha = linalg.solve(matrix, rhs)

    roots = np.empty(geometry.count)
    for n in range(geometry.count):
        others = np.arange(geometry.count) != n

        def reduced(s: float, n: int = n, others: _ARRAY = others) -> float:
            offset = s - mid[n]
            return offset + alpha[n] + offset * float(np.sum(alpha[others] / (s - mid[others])))

        lo, hi = geometry.a[n], geometry.b[n]
        f_lo, f_hi = reduced(lo), reduced(hi)
        if f_lo * f_hi < 0:
            roots[n] = _brent(reduced, lo, hi, 1e-15 * max(1.0, abs(hi)))
        else:
            grid = np.linspace(lo, hi, 2003)[1:-1]
            roots[n] = grid[np.argmin(np.abs([reduced(s) for s in grid]))]
    return roots


def _polish(geometry: GapGeometry, c: _ARRAY, tol: float) -> Tuple[_ARRAY, List[float]]:
    """Damped Newton with a finite-difference Jacobian, then per-gap bisection sweeps."""
    a, b = geometry.a, geometry.b
    trace: List[float] = []
    residual = _closure_residuals(geometry, c)
    for _ in range(30):
        norm = float(np.max(np.abs(residual)))
        trace.append(norm)
        if norm <= tol:
            return c, trace
        step_sizes = 1e-7 * (b - a)
        jacobian = np.empty((geometry.count, geometry.count))
        for j in range(geometry.count):
            shifted = c.copy()
            shifted[j] += step_sizes[j]
            jacobian[:, j] = (_closure_residuals(geometry, shifted) - residual) / step_sizes[j]
        try:
            step = linalg.solve(jacobian, -residual)
        except linalg.LinAlgError:
            break
        damping = 1.0
        accepted = False
        while damping > 1e-4:
            trial = c + damping * step
            if np.all((trial > a) & (trial < b)):
                trial_residual = _closure_residuals(geometry, trial)
                if np.max(np.abs(trial_residual)) < norm:
                    c, residual, accepted = trial, trial_residual, True
                    break
            damping *= 0.5
        if not accepted:
            break

    # each closure integral increases strictly in its own c_n
    for _ in range(60):
        for n in range(geometry.count):

            def own(s: float, n: int = n) -> float:
                trial = c.copy()
                trial[n] = s
                return float(_closure_residuals(geometry, trial)[n])

            c[n] = _brent(own, a[n], b[n], 1e-15 * max(1.0, abs(b[n])))
        norm = float(np.max(np.abs(_closure_residuals(geometry, c))))
        trace.append(norm)
        if norm <= tol:
            return c, trace
    raise NewtonDivergence(
        f"closure residual {trace[-1]:.3e} did not reach {tol:.1e}", trace=trace
    )


def solve_critical_points(
    gaps: GapSystem, settings: Optional[QuadratureSettings] = None
) -> GapSystem:
    """Fill in the critical point of every gap so that v vanishes at both gap ends."""
    settings = settings or QuadratureSettings()
    if gaps.count == 0:
        return gaps.with_critical_points(())
    geometry = GapGeometry(gaps.z_minus, gaps.z_plus, settings)
    tol = settings.closure_tol * max(1.0, float(np.max(geometry.half)))
    c = _moment_guess(geometry)
    if not np.all((c > geometry.a) & (c < geometry.b)):
        raise InvalidInterlacing("critical point estimate left its gap")
    residual = float(np.max(np.abs(_closure_residuals(geometry, c))))
    if residual > tol:
        logger.debug(f"Moment estimate residual {residual:.3e}; polishing {gaps.count} gaps")
        c, trace = _polish(geometry, c, tol)
        logger.debug(f"Polished closure residual trace: {trace}")
    return gaps.with_critical_points(c)


class Quasimomentum:
    """Evaluation of k(z), q(z) = k'(z) and derived gap quantities."""

    def __init__(self, gaps: GapSystem, settings: Optional[QuadratureSettings] = None):
        self.settings = settings or QuadratureSettings()
        if gaps.c is None:
            gaps = solve_critical_points(gaps, self.settings)
        self.gaps = gaps
        self.geometry = GapGeometry(gaps.z_minus, gaps.z_plus, self.settings)
        self.a = self.geometry.a
        self.b = self.geometry.b
        self.c = np.asarray(gaps.c, dtype=float)
        self.count = self.geometry.count
        self.endpoints = np.sort(np.concatenate([self.a, self.b]))
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    @property
    def scale(self) -> float:
        return max(self.geometry.span, 1e-300)

    # derivative

    def _q_upper(self, w: _ARRAY) -> _ARRAY:
        w3 = w[..., None]
        ratio = (w3 - self.c) / (np.sqrt(w3 - self.a) * np.sqrt(w3 - self.b))
        return ratio.prod(axis=-1)

    def _q_real(self, x: _ARRAY) -> _ARRAY:
        x3 = x[..., None]
        modulus = (np.abs(x3 - self.c) / np.sqrt(np.abs(x3 - self.a) * np.abs(x3 - self.b))).prod(
            axis=-1
        )
        inside = (x3 > self.a) & (x3 < self.b)
        in_gap = inside.any(axis=-1)
        gap_index = np.argmax(inside, axis=-1)
        phase = np.where(in_gap, 1j * np.sign(self.c[gap_index] - x), 1.0)
        return modulus * phase

    def q_eval(self, z) -> np.ndarray:
        """q(z) for scalar or array z off the gap endpoints."""
        z_arr = np.asarray(z, dtype=complex)
        if self.count == 0:
            return np.ones_like(z_arr)
        if np.any(np.isin(z_arr, self.endpoints.astype(complex))):
            raise EvaluationAtBranchPoint("q is singular at gap endpoints")
        out = np.empty_like(z_arr)
        upper = z_arr.imag > 0
        lower = z_arr.imag < 0
        real = ~(upper | lower)
        out[upper] = self._q_upper(z_arr[upper])
        out[lower] = np.conj(self._q_upper(np.conj(z_arr[lower])))
        out[real] = self._q_real(z_arr[real].real)
        return out

    @property
    def beta1(self) -> float:
        """Coefficient of 1/z in q(z) - 1; zero once the gaps close."""
        return float(np.sum(self.geometry.mid) - np.sum(self.c))

    # quasimomentum

    def _endpoint_distance(self, w: _ARRAY) -> _ARRAY:
        d = np.abs(w[:, None] - self.endpoints[None, :])
        return np.where(d == 0.0, np.inf, d).min(axis=1)

    def k_eval(self, z) -> np.ndarray:
        """k(z) = z - i * int_0^inf (q(z + i s) - 1) ds, using conjugate symmetry below the axis."""
        z_arr = np.asarray(z, dtype=complex)
        if self.count == 0:
            return z_arr.copy()
        flat = np.atleast_1d(z_arr).ravel()
        lower = flat.imag < 0
        w0 = np.where(lower, np.conj(flat), flat)
        centre = 0.5 * (self.a[0] + self.b[-1])
        radius = 0.5 * self.geometry.span
        reach = 2.0 * (radius + np.abs(w0 - centre))

        eps = np.sqrt(self._endpoint_distance(w0) / reach)
        ratio = self.settings.grading_ratio
        levels = grading_levels(float(np.min(eps)), 0.5, ratio, self.settings.max_levels)
        t, w = graded_rule(levels, ratio, self.settings.nodes_per_panel, GRADE_LEFT)
        root = np.sqrt(reach)[:, None]
        sigma = root * t[None, :]
        ray = ((self._q_upper(w0[:, None] + 1j * sigma**2) - 1.0) * 2.0 * sigma * (root * w)).sum(
            axis=1
        )

        tau, tw = panel_rule(2, self.settings.tail_nodes)
        s_tail = reach[:, None] / tau[None, :]
        tail = ((self._q_upper(w0[:, None] + 1j * s_tail) - 1.0) * s_tail / tau * tw).sum(axis=1)

        k = w0 - 1j * (ray + tail)
        if not np.all(np.isfinite(k)):
            raise QuadratureFailure("non-finite quasimomentum value")
        mirrored = np.where(lower, np.conj(k), k)
        return mirrored.reshape(z_arr.shape) if z_arr.ndim else mirrored[0]

    # gap and band integrals

    def _band_integrals(self) -> _ARRAY:
        """int q over each bounded band, with the singular end factors cancelled."""
        geo = self.geometry
        if self.count < 2:
            return np.zeros(0)
        lo, hi = self.b[:-1], self.a[1:]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        eps = angular_distance(np.minimum(geo.half[:-1], geo.half[1:]) * 2.0, half)
        levels = grading_levels(
            float(np.min(eps)), math.pi / 4.0, self.settings.grading_ratio, self.settings.max_levels
        )
        theta, weights = geo._angular_rule(levels)
        t = mid[:, None] + half[:, None] * np.cos(theta)[None, :]
        rows = np.arange(self.count - 1)
        drop_b = np.zeros((self.count - 1, self.count), dtype=bool)
        drop_a = np.zeros_like(drop_b)
        drop_b[rows, rows] = True
        drop_a[rows, rows + 1] = True
        t3 = t[..., None]
        dist_a = np.where(drop_a[:, None, :], 1.0, np.abs(t3 - self.a))
        dist_b = np.where(drop_b[:, None, :], 1.0, np.abs(t3 - self.b))
        integrand = (np.abs(t3 - self.c) / np.sqrt(dist_a * dist_b)).prod(axis=-1)
        return integrand @ weights

    def _right_tail(self) -> float:
        """int_{b_M}^inf (q - 1) dt along the real axis."""
        last = self.b[-1]
        dc = last - self.c
        da = last - self.a
        db = last - self.b
        span = self.geometry.span
        reach = 2.0 * span

        def log_q(s: _ARRAY) -> _ARRAY:
            s3 = s[..., None]
            return (np.log1p(dc / s3) - 0.5 * np.log1p(da / s3) - 0.5 * np.log1p(db / s3)).sum(
                axis=-1
            )

        nearest = self.geometry.half[-1] * 2.0
        if self.count > 1:
            nearest = min(nearest, float(last - self.b[-2]))
        ratio = self.settings.grading_ratio
        levels = grading_levels(
            math.sqrt(nearest / reach), 0.5, ratio, self.settings.max_levels
        )
        t, w = graded_rule(levels, ratio, self.settings.nodes_per_panel, GRADE_LEFT)
        root = math.sqrt(reach)
        sigma = root * t
        near = float(np.sum(2.0 * sigma * np.expm1(log_q(sigma**2)) * root * w))

        tau, tw = panel_rule(2, self.settings.tail_nodes)
        s = reach / tau
        far = float(np.sum(np.expm1(log_q(s)) * s / tau * tw))
        return near + far

    @cached_property
    def _positions_and_heights(self) -> Tuple[_ARRAY, _ARRAY]:
        if self.count == 0:
            return np.zeros(0), np.zeros(0)
        geo = self.geometry
        u = np.empty(self.count)
        u[-1] = self.b[-1] - self._right_tail()
        bands = self._band_integrals()
        for n in range(self.count - 2, -1, -1):
            u[n] = u[n + 1] - bands[n]

        start = self._crest_angles()
        theta = start[:, None] + (math.pi - start)[:, None] * (geo.theta / math.pi)[None, :]
        weights = (math.pi - start)[:, None] * (geo.weights / math.pi)[None, :]
        t = geo.mid[:, None] + geo.half[:, None] * np.cos(theta)
        h = ((self.c[:, None] - t) * geo.gap_factor(t, self.c) * weights).sum(axis=1)
        return u, h

    def _crest_angles(self) -> _ARRAY:
        geo = self.geometry
        return np.arccos(np.clip((self.c - geo.mid) / geo.half, -1.0, 1.0))

    def heights_and_positions(self) -> Tuple[_ARRAY, _ARRAY]:
        """(u_n, h_n): real part of k on each gap and the maximum of v there."""
        u, h = self._positions_and_heights
        return u.copy(), h.copy()

    @property
    def positions(self) -> _ARRAY:
        return self._positions_and_heights[0]

    @property
    def heights(self) -> _ARRAY:
        return self._positions_and_heights[1]

    def closure_residuals(self) -> _ARRAY:
        return _closure_residuals(self.geometry, self.c)

    def v_on_gap(self, n: int, x) -> np.ndarray:
        """v(x) = Im k(x + i0) for x in the closed gap n."""
        geo = self.geometry
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr < self.a[n]) or np.any(x_arr > self.b[n]):
            raise OutOfGap(f"points outside gap {n} = ({self.a[n]}, {self.b[n]})")
        flat = np.atleast_1d(x_arr).ravel()
        start = np.arccos(np.clip((flat - geo.mid[n]) / geo.half[n], -1.0, 1.0))
        span = math.pi - start
        theta = start[:, None] + span[:, None] * (geo.theta / math.pi)[None, :]
        t = geo.mid[n] + geo.half[n] * np.cos(theta)
        factor = geo.single_gap_factor(n, t, self.c)
        raw = ((self.c[n] - t) * factor * span[:, None] * (geo.weights / math.pi)[None, :]).sum(
            axis=1
        )
        values = np.maximum(raw, 0.0)
        return values.reshape(x_arr.shape) if x_arr.ndim else values[0]

    @cached_property
    def _actions(self) -> _ARRAY:
        if self.count == 0:
            return np.zeros(0)
        geo = self.geometry
        t = geo.gap_nodes()
        integrand = (t - geo.mid[:, None]) * (t - self.c[:, None]) * geo.gap_factor(t, self.c)
        return 2.0 / math.pi * (integrand @ geo.weights)

    def actions(self) -> _ARRAY:
        return self._actions.copy()

    def action(self, n: int) -> float:
        """A_n = (2/pi) int_{gap n} v dx."""
        return float(self._actions[n])

    def sqrt_action(self, n: int) -> float:
        return math.sqrt(max(self.action(n), 0.0))

    @cached_property
    def _profiles(self) -> Tuple[_ARRAY, _ARRAY]:
        """Gap nodes x[m, k] and weighted values v(x) dx for every gap."""
        geo = self.geometry
        x = geo.gap_nodes()
        dx = geo.half[:, None] * np.sin(geo.theta)[None, :] * geo.weights[None, :]
        vdx = np.stack([self.v_on_gap(m, x[m]) for m in range(self.count)]) * dx
        return x, vdx

    def q0_and_dirichlet(self) -> Tuple[float, float]:
        """Q0 = (1/pi) int v over the real line and I_D = 2 Q0, cross-checked with sum A_n."""
        if self.count == 0:
            return 0.0, 0.0
        q0 = float(self._profiles[1].sum() / math.pi)
        dirichlet = 2.0 * q0
        total = float(self._actions.sum())
        tolerance = self.settings.identity_tol * max(1.0, q0)
        if abs(dirichlet - total) > tolerance:
            raise IdentityViolation(
                f"2Q0={dirichlet:.15g} differs from sum A_n={total:.15g} beyond {tolerance:.1e}"
            )
        return q0, dirichlet

    def effective_masses(self, n: int) -> Tuple[float, float]:
        """(mu_minus, mu_plus) at the gap ends; mu_minus <= 0 <= mu_plus."""
        geo = self.geometry
        ends = np.array([self.a[n], self.b[n]])
        factor = geo.single_gap_factor(n, ends, self.c)
        limit = factor * np.abs(self.c[n] - ends) / math.sqrt(self.b[n] - self.a[n])
        masses = 2.0 * limit**2
        return -float(masses[0]), float(masses[1])

    def tip_mass(self, n: int) -> float:
        """nu_n = 1 / |q'(c_n)|."""
        geo = self.geometry
        factor = float(geo.single_gap_factor(n, np.array(self.c[n]), self.c))
        return math.sqrt((self.c[n] - self.a[n]) * (self.b[n] - self.c[n])) / factor

    def invariant_length(self, n: int) -> float:
        """L_n = 2 int_{gap n} sqrt(v'(x)^2 + 1) dx."""
        geo = self.geometry
        t = geo.mid[n] + geo.half[n] * np.cos(geo.theta)
        slope = (self.c[n] - t) * geo.single_gap_factor(n, t, self.c)
        arc = np.hypot(slope, geo.half[n] * np.sin(geo.theta))
        return 2.0 * float(arc @ geo.weights)

    def perturbation_v(self, n: int, x) -> np.ndarray:
        """V_n(x) = (1/pi) sum over other gaps of int v(t) dt / (|t - x| v_n(t))."""
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr < self.a[n]) or np.any(x_arr > self.b[n]):
            raise OutOfGap(f"points outside gap {n}")
        flat = np.atleast_1d(x_arr).ravel()
        values: _ARRAY
        if self.count < 2:
            values = np.zeros_like(flat)
        else:
            nodes, vdx = self._profiles
            others = np.arange(self.count) != n
            t = nodes[others].ravel()
            weight = vdx[others].ravel() / np.sqrt(np.abs((t - self.a[n]) * (t - self.b[n])))
            values = (weight[None, :] / np.abs(t[None, :] - flat[:, None])).sum(axis=1) / math.pi
        return values.reshape(x_arr.shape) if x_arr.ndim else values[0]

    # inverse map

    def _newton(self, target: _ARRAY, z: _ARRAY, max_iter: int = 40) -> Tuple[_ARRAY, _ARRAY]:
        tol = self.settings.inversion_tol * self.scale
        z = z.copy()
        residual = self.k_eval(z) - target
        stalled = np.zeros(z.shape, dtype=bool)
        for _ in range(max_iter):
            active = (np.abs(residual) > tol) & ~stalled
            if not active.any():
                break
            idx = np.flatnonzero(active)
            step = residual[idx] / self.q_eval(z[idx])
            current = np.abs(residual[idx])
            damping = np.ones(idx.size)
            pending = np.ones(idx.size, dtype=bool)
            for _ in range(30):
                trial = z[idx] - damping * step
                candidates = pending & (trial.imag > 0)
                if candidates.any():
                    sel = np.flatnonzero(candidates)
                    new_residual = self.k_eval(trial[sel]) - target[idx[sel]]
                    better = np.abs(new_residual) < current[sel]
                    take = sel[better]
                    z[idx[take]] = trial[take]
                    residual[idx[take]] = new_residual[better]
                    pending[take] = False
                if not pending.any():
                    break
                damping[pending] *= 0.5
            stalled[idx[pending]] = True
        error = np.abs(residual)
        converged = (error <= tol) | (stalled & (error <= 1e3 * tol))
        return z, converged

    def _advance(self, k_from: _ARRAY, z_from: _ARRAY, k_to: _ARRAY, depth: int) -> _ARRAY:
        linear = z_from + (k_to - k_from) / self.q_eval(z_from)
        guess = np.where(linear.imag > 0, linear, z_from)
        z, ok = self._newton(k_to, guess)
        if ok.all():
            return z
        if depth >= 12:
            raise InversionFailure(
                f"inverse map did not converge near k={k_to[~ok][0]:.6g} after {depth} subdivisions"
            )
        bad = np.flatnonzero(~ok)
        k_mid = 0.5 * (k_from[bad] + k_to[bad])
        z_mid = self._advance(k_from[bad], z_from[bad], k_mid, depth + 1)
        z[bad] = self._advance(k_mid, z_mid, k_to[bad], depth + 1)
        return z

    def _track(self, target: _ARRAY) -> _ARRAY:
        """Follow z(k) down vertical lines from far above the slits to the targets."""
        lift = 4.0 * self.scale + 2.0 * float(np.max(self.heights, initial=0.0))
        start = target.real + 1j * (target.imag + lift)
        z, ok = self._newton(start, start.copy())
        if not ok.all():
            raise InversionFailure("inverse map failed far above the slits")
        k_prev = start
        for j in range(1, 31):
            k_next = target.real + 1j * (target.imag + lift * 0.5**j)
            z = self._advance(k_prev, z, k_next, 0)
            k_prev = k_next
        return self._advance(k_prev, z, target, 0)

    def z_of_k(self, k) -> np.ndarray:
        """Inverse comb map z(k) for k off the slits."""
        k_arr = np.asarray(k, dtype=complex)
        if self.count == 0:
            return k_arr.copy()
        flat = np.atleast_1d(k_arr).ravel()
        lower = flat.imag < 0
        target = np.where(lower, np.conj(flat), flat)
        out = np.empty_like(target)
        real = target.imag == 0
        for i in np.flatnonzero(real):
            out[i] = self.band_preimage(float(target[i].real))
        if (~real).any():
            out[~real] = self._track(target[~real])
        mapped = np.where(lower, np.conj(out), out)
        return mapped.reshape(k_arr.shape) if k_arr.ndim else mapped[0]

    def band_preimage(self, value: float) -> float:
        """The real point z on a band with k(z) = value."""
        if self.count == 0:
            return float(value)
        u = self.positions
        if np.any(np.abs(u - value) <= self.settings.closure_tol * self.scale):
            raise OnSlit(f"k={value} is the base of a slit")
        j = int(np.searchsorted(u, value))
        span = self.scale

        def shifted(x: float) -> float:
            return float(self.k_eval(x).real) - value

        if j > 0:
            lo = float(self.b[j - 1])
        else:
            lo = float(self.a[0]) - (float(u[0]) - value) - span
            while shifted(lo) > 0:
                lo -= span
        if j < self.count:
            hi = float(self.a[j])
        else:
            hi = float(self.b[-1]) + (value - float(u[-1])) + span
            while shifted(hi) < 0:
                hi += span
        return _brent(shifted, lo, hi, 1e-14 * span)

    # area integrals through Green's identity

    def _segment_rule(self, length: float, resolution: float) -> Tuple[_ARRAY, _ARRAY]:
        """Uniform panels on [0, length], none wider than `resolution`."""
        panels = int(min(max(math.ceil(length / resolution), 1), 256))
        t, w = panel_rule(panels, self.settings.nodes_per_panel)
        return length * t, length * w

    def _clearance(self, position: float) -> float:
        """Horizontal distance from Re k = position to the nearest slit."""
        distance = float(np.min(np.abs(self.positions - position)))
        if distance == 0.0:
            raise OnSlit(f"vertical line Re k={position} runs along a slit")
        return distance

    def vertical_line_flux(self, position: float) -> float:
        """int_0^inf Re(conj(f) f') dv along k = position + i v, with f = z(k) - k."""
        if self.count == 0:
            return 0.0
        clearance = self._clearance(position)
        end = 2.0 * (float(np.max(self.heights)) + clearance)
        v_near, w_near = self._segment_rule(end, clearance)
        tau, tw = panel_rule(2, self.settings.tail_nodes)
        v = np.concatenate([v_near, end / tau])
        w = np.concatenate([w_near, end / tau**2 * tw])
        k = position + 1j * v
        z = self.z_of_k(k)
        f = z - k
        fp = 1.0 / self.q_eval(z) - 1.0
        return float(np.sum((np.conj(f) * fp).real * w))

    def strip_dirichlet(self, centre: float, half_width: float, gap: Optional[int] = None) -> float:
        """(1/pi) * area integral of |z' - 1|^2 over the strip |Re k - centre| < half_width.

        `gap` names the gap whose slit lies inside the strip, if any.
        """
        if self.count == 0:
            return 0.0
        u = self.positions
        inside = np.abs(u - centre) < half_width
        expected = {gap} if gap is not None else set()
        if set(np.flatnonzero(inside).tolist()) != expected:
            raise OnSlit("strip must contain exactly the requested slit")
        flux = self.vertical_line_flux(centre + half_width) - self.vertical_line_flux(
            centre - half_width
        )
        value = flux / math.pi + (self.action(gap) if gap is not None else 0.0)
        return max(value, 0.0)

    def local_dirichlet(self, n: int, r: float) -> float:
        """I_n over the strip of half-width r around slit n."""
        return self.strip_dirichlet(float(self.positions[n]), r, gap=n)

    def rectangle_dirichlet(self, n: int, r: float) -> float:
        """Area integral of |z' - 1|^2 over (u_n, u_n + r) x (-h_n, h_n)."""
        geo = self.geometry
        u_n = float(self.positions[n])
        h_n = float(self.heights[n])
        if np.any((self.positions > u_n) & (self.positions < u_n + r)):
            raise OnSlit("rectangle reaches a neighbouring slit")
        if h_n == 0.0:
            return 0.0

        # right edge, v from 0 to h_n
        v, w = self._segment_rule(h_n, self._clearance(u_n + r))
        k_right = u_n + r + 1j * v
        z_right = self.z_of_k(k_right)
        f = z_right - k_right
        right = np.sum(np.conj(f) * (1.0 / self.q_eval(z_right) - 1.0) * 1j * w)

        # top edge traversed toward the tip; U = u_n + r s^2 tames the tip singularity
        s, w = panel_rule(4, self.settings.nodes_per_panel)
        k_top = u_n + r * s**2 + 1j * h_n
        z_top = self.z_of_k(k_top)
        f = z_top - k_top
        top = -np.sum(np.conj(f) * (1.0 / self.q_eval(z_top) - 1.0) * 2.0 * r * s * w)

        # right side of the slit, read off the gap from the crest down to z_plus
        crest = float(self._crest_angles()[n])
        theta = crest * geo.theta / math.pi
        x = geo.mid[n] + geo.half[n] * np.cos(theta)
        v = self.v_on_gap(n, x)
        f_bar = x - u_n + 1j * v
        df = -geo.half[n] * np.sin(theta) + 1j * (self.c[n] - x) * geo.single_gap_factor(
            n, x, self.c
        )
        side = -np.sum(f_bar * df * crest * geo.weights / math.pi)

        return float((right + top + side).imag)
