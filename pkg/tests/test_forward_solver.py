#!/usr/bin/env python3
"""
Tests for the forward solver and its consistency reports.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import numpy as np
import pytest

from comb_mapping.core import forward_solver
from comb_mapping.core.forward_solver import (
    ForwardSolver,
    SolverOptions,
    lindelof_pair_check,
    round_trip_check,
    solve_forward,
)
from comb_mapping.core.quasimomentum import Quasimomentum
from comb_mapping.domain import GapSystem, SlitConfig
from comb_mapping.exceptions import (
    ContinuationExhausted,
    InvalidOptions,
    InvalidPair,
    MonotonicityViolation,
    NumericalError,
)


class TestSolverOptions:
    def test_defaults(self):
        options = SolverOptions()
        assert options.residual_tol == 1e-9
        assert options.continuation_steps == 8

    def test_rejects_nonpositive_tolerance(self):
        with pytest.raises(InvalidOptions):
            SolverOptions(residual_tol=0.0)

    def test_rejects_unknown_keys(self):
        with pytest.raises(InvalidOptions):
            SolverOptions.from_dict({"residual_tol": 1e-8, "damping": 0.5})

    def test_merged_overrides_fields(self):
        options = SolverOptions().merged({"max_newton_iters": 5})
        assert options.max_newton_iters == 5
        assert options.residual_tol == 1e-9
        assert SolverOptions().merged(None) == SolverOptions()


class TestSolveForward:
    """Gap systems reproducing slit configurations."""

    def test_single_slit(self, single_slit_solution):
        gaps = single_slit_solution.gaps
        assert gaps.z_minus[0] == pytest.approx(-1.0, abs=1e-8)
        assert gaps.z_plus[0] == pytest.approx(1.0, abs=1e-8)
        assert gaps.c[0] == pytest.approx(0.0, abs=1e-8)

    def test_shifted_single_slit(self):
        solution = solve_forward(SlitConfig((2.0,), (0.5,)))
        assert solution.gaps.z_minus[0] == pytest.approx(1.5, abs=1e-8)
        assert solution.gaps.z_plus[0] == pytest.approx(2.5, abs=1e-8)

    def test_all_empty_slits_give_identity(self):
        solution = solve_forward(SlitConfig((0.0, 1.0), (0.0, 0.0)))
        assert solution.gaps.count == 0
        assert solution.residual == 0.0
        assert complex(solution.z_of_k(0.5 + 0.5j)) == 0.5 + 0.5j

    def test_residual_within_tolerance(self, two_slit_solution):
        assert two_slit_solution.residual <= 1e-9
        assert two_slit_solution.continuation_path[-1][0] == 1.0

    def test_reproduces_positions_and_heights(self, two_slit_solution, two_slit_config):
        u, h = two_slit_solution.quasimomentum.heights_and_positions()
        np.testing.assert_allclose(u, two_slit_config.u, atol=1e-8)
        np.testing.assert_allclose(h, two_slit_config.h, atol=1e-8)

    def test_gaps_contain_slit_bases(self, two_slit_solution, two_slit_config):
        gaps = two_slit_solution.gaps
        for n in range(two_slit_config.size):
            assert gaps.z_minus[n] < gaps.c[n] < gaps.z_plus[n]
        assert gaps.z_plus[0] < gaps.z_minus[1]

    def test_symmetric_configuration(self):
        solution = solve_forward(SlitConfig((-1.0, 1.0), (0.7, 0.7)))
        gaps = solution.gaps
        assert gaps.z_minus[0] == pytest.approx(-gaps.z_plus[1], abs=1e-8)
        assert gaps.c[0] == pytest.approx(-gaps.c[1], abs=1e-8)

    def test_empty_slit_gets_no_gap(self, gapped_solution):
        assert gapped_solution.gaps.count == 2
        assert gapped_solution.active == (0, 2)
        assert gapped_solution.gap_of(1) is None
        assert gapped_solution.gap_of(2) == 1

    def test_gap_lengths_bounded_by_twice_height(self, two_slit_solution, two_slit_config):
        lengths = two_slit_solution.gaps.lengths
        assert np.all(lengths <= 2.0 * np.asarray(two_slit_config.h) + 1e-9)

    def test_recovers_gap_system_from_its_own_heights(self):
        original = Quasimomentum(GapSystem((-2.0, 0.5), (-1.0, 3.0)))
        u, h = original.heights_and_positions()
        solution = solve_forward(SlitConfig(tuple(u), tuple(h)))
        np.testing.assert_allclose(solution.gaps.z_minus, original.a, atol=1e-7)
        np.testing.assert_allclose(solution.gaps.z_plus, original.b, atol=1e-7)

    def test_solution_independent_of_continuation_path(self, two_slit_config):
        options = SolverOptions(residual_tol=1e-10)
        coarse = solve_forward(two_slit_config, options.merged({"continuation_steps": 2}))
        fine = solve_forward(two_slit_config, options.merged({"continuation_steps": 16}))
        np.testing.assert_allclose(coarse.gaps.z_minus, fine.gaps.z_minus, atol=1e-8)
        np.testing.assert_allclose(coarse.gaps.z_plus, fine.gaps.z_plus, atol=1e-8)
        np.testing.assert_allclose(coarse.gaps.c, fine.gaps.c, atol=1e-8)

    def test_continuation_failure_reports_path(self, mocker):
        mocker.patch.object(
            forward_solver._HeightContinuation,
            "newton",
            return_value=(np.zeros(2), 1.0, 1, False),
        )
        with pytest.raises(ContinuationExhausted) as excinfo:
            solve_forward(SlitConfig((0.0,), (1.0,)))
        assert excinfo.value.last_t == 0.0
        assert excinfo.value.exit_code == 3
        assert isinstance(excinfo.value, NumericalError)

    def test_active_slits_threshold(self):
        solver = ForwardSolver(SolverOptions(empty_threshold=1e-3))
        config = SlitConfig((0.0, 1.0, 2.0), (1.0, 1e-4, 0.5))
        assert solver.active_slits(config) == [0, 2]

    def test_to_dict(self, single_slit_solution):
        data = single_slit_solution.to_dict()
        assert data["config"] == {"u": [0.0], "h": [1.0]}
        assert set(data["gaps"]) == {"z_minus", "c", "z_plus", "slits"}


class TestRoundTrip:
    def test_refined_recomputation_agrees(self, two_slit_solution):
        report = round_trip_check(two_slit_solution)
        assert report.nodes_per_panel == 32
        assert report.max_deviation < 1e-8
        assert report.closure_residual < 1e-9

    def test_empty_slits_report_zero(self, gapped_solution):
        report = round_trip_check(gapped_solution)
        assert report.u_deviation[1] == 0.0
        assert report.h_deviation[1] == 0.0


class TestLindelofPairs:
    """Monotonicity under height decrease."""

    @pytest.fixture(scope="class")
    def pair(self):
        small = SlitConfig((0.0, 1.0, 2.0), (0.5, 1.0, 0.3))
        big = SlitConfig((0.0, 1.0, 2.0), (1.0, 1.0, 0.6))
        return small, big

    def test_monotone_pair_passes(self, pair):
        report = lindelof_pair_check(*pair)
        assert report.passed
        assert report.strict_required
        assert report.q0_small < report.q0_big
        assert report.kept_slits == [1]
        assert report.l_small[0] >= report.l_big[0]
        assert report.grid_points == 100
        assert report.y_margin >= 0

    def test_swapped_solutions_violate(self, pair):
        small, big = pair
        solutions = (solve_forward(big), solve_forward(small))
        with pytest.raises(MonotonicityViolation):
            lindelof_pair_check(small, big, solutions=solutions)
        report = lindelof_pair_check(small, big, solutions=solutions, raise_on_violation=False)
        assert not report.passed
        assert any(v.startswith("2.26") for v in report.violations)

    def test_identical_pair_needs_no_strictness(self):
        config = SlitConfig((0.0, 1.5), (0.4, 0.8))
        report = lindelof_pair_check(config, config, grid=4)
        assert report.passed
        assert not report.strict_required

    def test_positions_must_match(self):
        with pytest.raises(InvalidPair):
            lindelof_pair_check(SlitConfig((0.0,), (1.0,)), SlitConfig((1.0,), (1.0,)))

    def test_heights_must_be_ordered(self):
        with pytest.raises(InvalidPair):
            lindelof_pair_check(SlitConfig((0.0,), (2.0,)), SlitConfig((0.0,), (1.0,)))
