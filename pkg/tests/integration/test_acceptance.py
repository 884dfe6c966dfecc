#!/usr/bin/env python3
"""
End-to-end verification runs at ensemble scale.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import math

import numpy as np
import pytest

from comb_mapping.core.capacity import (
    IntervalUnion,
    derivative_at_infinity,
    max_modulus,
    total_length,
)
from comb_mapping.core.closed_forms import (
    nesting_config,
    nesting_gap_bound,
    nesting_outer_config,
    three_slit_nesting,
    uniform_comb_gap_length,
)
from comb_mapping.core.forward_solver import solve_forward
from comb_mapping.core.quantities import compute_quantities
from comb_mapping.domain import SlitConfig
from comb_mapping.estimates.ensemble import EnsembleSpec, run_ensemble
from comb_mapping.estimates.examples import counterexample_convergence, reproduce_example

pytestmark = [pytest.mark.integration, pytest.mark.slow]


@pytest.fixture(scope="module")
def default_ensemble():
    """The seeded 200-instance ensemble with 20 Lindelof pairs."""
    return run_ensemble(EnsembleSpec(seed=42, count=200, lindelof_pairs=20), workers=4)


class TestSingleSlitOracle:
    def test_closed_form_values(self):
        q = compute_quantities(solve_forward(SlitConfig((0.0,), (1.0,))))
        expected = {"l": 2.0, "A": 1.0, "J": 1.0, "mu_plus": 1.0, "nu": 1.0}
        for name, value in expected.items():
            assert getattr(q, name)[0] == pytest.approx(value, abs=1e-8), name
        assert abs(q.mu_minus[0]) == pytest.approx(1.0, abs=1e-8)
        assert q.Q0 == pytest.approx(0.5, abs=1e-8)
        assert q.ID == pytest.approx(1.0, abs=1e-8)


class TestDefaultEnsemble:
    def test_no_errors_or_violations(self, default_ensemble):
        assert default_ensemble.errors == []
        assert default_ensemble.violations == []
        assert default_ensemble.exit_code == 0

    def test_dirichlet_identity_on_every_instance(self, default_ensemble):
        identities = [
            r for r in default_ensemble.results if r.check_id == "1.5" and r.note == "2Q0 = sum A_n"
        ]
        assert len(identities) == 200
        assert all(r.passed for r in identities)

    def test_profile_factorization_checked(self, default_ensemble):
        factorizations = [r for r in default_ensemble.results if r.check_id == "3.32"]
        assert factorizations
        assert all(r.passed for r in factorizations)

    def test_lindelof_pairs(self, default_ensemble):
        pairs = [o for o in default_ensemble.outcomes if o.kind == "pair"]
        assert len(pairs) == 20
        ids = {r.check_id for o in pairs for r in o.results}
        assert {"2.26", "2.23"} <= ids
        assert all(r.passed for o in pairs for r in o.results)

    def test_inequality_families_covered(self, default_ensemble):
        ids = {r.check_id for r in default_ensemble.results if r.applicable}
        for check_id in ("1.3", "2.2", "2.3", "2.6", "2.28", "3.20", "3.33", "2.16"):
            assert check_id in ids


class TestSmallSlitEnsemble:
    def test_local_estimates(self):
        report = run_ensemble(EnsembleSpec.small_slits(seed=42), workers=4)
        assert report.errors == []
        assert report.violations == []
        assert any(r.applicable for r in report.results)


class TestCapacity:
    def test_random_unions(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            count = int(rng.integers(1, 6))
            edges = np.cumsum(rng.uniform(0.1, 2.0, 2 * count)) - 3.0
            union = IntervalUnion.from_pairs(edges.reshape(count, 2))
            assert derivative_at_infinity(union) == pytest.approx(
                total_length(union) / 4.0, abs=1e-8
            )
            assert max_modulus(union) <= 1.0 + 1e-12


class TestUniformComb:
    def test_truncations_converge(self):
        trend = counterexample_convergence(sizes=(12, 25, 50), height=1.0)
        assert trend.limit == pytest.approx(2.0 * math.asin(math.tanh(1.0)))
        assert trend.errors[-1] <= 1e-2
        assert trend.monotone
        assert trend.height_ratios == sorted(trend.height_ratios)
        assert all(length < math.pi for length in trend.central_lengths)
        assert uniform_comb_gap_length(1.0) < math.pi


class TestWorkedExamples:
    def test_example_one(self):
        report = reproduce_example(1, 3)
        assert report.passed
        assert 9.0 <= report.values["I_D"] <= 144.0

    def test_example_two(self):
        report = reproduce_example(2, 4)
        assert report.passed
        assert report.values["|l|_1"] <= 32.0
        assert report.values["|l|^2"] <= 8.0 * 8.0**0.25 * 4**1.5


def _off_slit_points(rng, heights, count):
    u = np.array([-1.0, 0.0, 1.0])
    points = []
    while len(points) < count:
        k = complex(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0))
        near = (np.abs(k.real - u) < 0.05) & (abs(k.imag) < heights + 0.05)
        if not near.any():
            points.append(k)
    return np.array(points)


class TestNesting:
    def test_three_slit_maps(self):
        rng = np.random.default_rng(37)
        for _ in range(20):
            h0, tall = rng.uniform(0.2, 2.0, 2)
            outer = solve_forward(nesting_outer_config(tall))
            solution = solve_forward(nesting_config(h0, tall))
            k = _off_slit_points(rng, np.array([tall, h0, tall]), 50)
            np.testing.assert_allclose(
                three_slit_nesting(k, h0, tall, outer=outer), solution.z_of_k(k), atol=1e-6
            )
            middle = solution.gaps.z_plus[1] - solution.gaps.z_minus[1]
            if h0 <= tall:
                assert middle <= nesting_gap_bound(h0, tall) + 1e-9
