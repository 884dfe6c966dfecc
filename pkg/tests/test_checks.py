#!/usr/bin/env python3
"""
Tests for the inequality checks.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import math

import pytest

from comb_mapping.core.forward_solver import LindelofReport
from comb_mapping.estimates.checks import (
    ALL_CHECK_IDS,
    KIND_RESIDUAL,
    CheckPlan,
    CheckResult,
    alpha_p,
    check_capacity,
    check_gap_identities,
    check_lemma_3_8,
    check_prop_3_6,
    check_theorem_1_1,
    check_theorem_1_2,
    check_theorem_1_5,
    check_theorem_3_3_and_3_5,
    lindelof_results,
    run_checks,
    violations,
    weight_vector,
    xi_factor,
)
from comb_mapping.exceptions import InvalidOptions


def ids(results):
    return {r.check_id for r in results}


class TestCheckResult:
    """Margins, tolerances and serialisation of one comparison."""

    def test_passing_comparison(self):
        result = CheckResult.compare("2.7", 1.0, 2.0, "ctx")
        assert result.passed
        assert result.margin == 1.0
        assert not result.near_violation

    def test_failing_comparison(self):
        result = CheckResult.compare("2.7", 2.0, 1.0, "ctx")
        assert not result.passed
        assert result.margin == -1.0

    def test_absolute_tolerance(self):
        assert CheckResult.compare("1.3", 2.0 + 5e-10, 2.0, "ctx").passed
        assert not CheckResult.compare("1.3", 2.0 + 1e-8, 2.0, "ctx").passed

    def test_relative_tolerance_for_local_checks(self):
        assert CheckResult.compare("3.10", 1.0005, 1.0, "ctx", rel_tol=1e-3).passed

    def test_equality_is_near_violation(self):
        assert CheckResult.compare("1.3", 2.0, 2.0, "ctx").near_violation
        assert not CheckResult.compare("3.11", 0.0, 0.0, "ctx").near_violation

    def test_residual_never_near_violation(self):
        result = CheckResult.residual("1.5", 1e-12, 1e-12, "ctx")
        assert result.kind == KIND_RESIDUAL
        assert result.passed
        assert not result.near_violation

    def test_not_applicable(self):
        result = CheckResult.not_applicable("2.3", "ctx", "p below 2")
        assert result.passed
        assert not result.applicable
        assert not result.near_violation

    def test_to_dict_is_strict_json(self):
        data = CheckResult.compare("2.2", 1.0, math.inf, "ctx", "p=1").to_dict()
        assert data == {
            "checkId": "2.2",
            "lhs": 1.0,
            "rhs": None,
            "margin": None,
            "passed": True,
            "instance": "ctx",
            "applicable": True,
            "note": "p=1",
        }


class TestCheckPlan:
    def test_defaults(self):
        plan = CheckPlan()
        assert plan.p_values == (1.0, 1.5, 2.0, 3.0)
        assert all(plan.wants(group) for group in ("identities", "lindelof", "capacity"))

    def test_filters_select_groups(self):
        plan = CheckPlan(filters=("3.10",))
        assert plan.wants("theorem_3_3_and_3_5")
        assert not plan.wants("identities")

    def test_keep_drops_other_ids(self):
        plan = CheckPlan(filters=("2.7",))
        results = [CheckResult.compare(i, 0.0, 1.0, "ctx") for i in ("2.6", "2.7")]
        assert [r.check_id for r in plan.keep(results)] == ["2.7"]

    @pytest.mark.parametrize(
        "kwargs",
        [{"p_values": (0.5,)}, {"weight_rules": ("cubic",)}, {"filters": ("9.99",)}],
    )
    def test_invalid_plans(self, kwargs):
        with pytest.raises(InvalidOptions):
            CheckPlan(**kwargs)

    def test_all_ids_unique(self):
        assert len(ALL_CHECK_IDS) == len(set(ALL_CHECK_IDS))


class TestHelpers:
    def test_weight_vectors(self):
        assert weight_vector("unit", [1.0, 2.0]) is None
        assert weight_vector("sobolev", [1.0, 2.0]) == (4.0, 16.0)
        with pytest.raises(InvalidOptions):
            weight_vector("other", [1.0])

    def test_constants_for_isolated_slit(self):
        assert alpha_p(2.0, math.inf) == 0.0
        assert xi_factor(3.0, math.inf) == 1.0

    def test_alpha_p(self):
        assert alpha_p(1.0, 2.0) == pytest.approx(8.0 * (2.0 + math.pi) / 2.0 / math.pi)

    def test_xi(self):
        assert xi_factor(2.0, 1.0) == pytest.approx(math.exp(2.0))


class TestSingleSlitChecks:
    """The single slit sits on several equality cases."""

    def test_identities_hold(self, single_slit_solution):
        results = check_gap_identities(single_slit_solution)
        assert not violations(results)
        assert {"1.3", "1.5", "2.20", "2.28", "2.30", "3.32", "L"} <= ids(results)

    def test_chain_for_p_one(self, single_slit_solution):
        results = check_theorem_1_1(single_slit_solution, 1.0)
        assert not violations(results)
        assert not next(r for r in results if r.check_id == "2.3").applicable

    def test_exponent_three_skips_small_p_bounds(self, single_slit_solution):
        results = check_theorem_1_1(single_slit_solution, 3.0)
        applicable = {r.check_id for r in results if r.applicable}
        assert applicable == {"2.3"}

    def test_lemma_needs_two_slits(self, single_slit_solution):
        results = check_lemma_3_8(single_slit_solution)
        assert results
        assert not any(r.applicable for r in results)

    def test_local_estimates(self, single_slit_solution):
        results = check_theorem_3_3_and_3_5(single_slit_solution)
        assert not violations(results)
        assert {"3.3", "3.10", "3.11", "3.12"} <= ids(results)

    def test_greedy_bounds(self, single_slit_solution):
        lower, upper = check_theorem_1_5(single_slit_solution)
        assert lower.passed and upper.passed
        assert lower.rhs == pytest.approx(0.5, abs=1e-8)

    def test_capacity(self, single_slit_solution):
        (result,) = check_capacity(single_slit_solution)
        assert result.passed
        assert result.lhs == pytest.approx(0.5, abs=1e-8)


class TestTwoSlitChecks:
    def test_weighted_bounds(self, two_slit_solution):
        weights = weight_vector("sobolev", [1.0, 3.0])
        results = check_theorem_1_2(two_slit_solution, 1.5, weights)
        assert not violations(results)
        assert ids(results) == {"2.6", "2.7", "2.8", "2.9", "2.10"}

    def test_weights_below_one_not_applicable(self, two_slit_solution):
        results = check_theorem_1_2(two_slit_solution, 2.0, (0.5, 1.0))
        assert not any(r.applicable for r in results)

    def test_exponent_outside_range_not_applicable(self, two_slit_solution):
        results = check_theorem_1_2(two_slit_solution, 3.0)
        assert not any(r.applicable for r in results)

    def test_energy_bounds(self, two_slit_solution):
        for p in (1.0, 2.0, 3.0):
            assert not violations(check_prop_3_6(two_slit_solution, p))

    def test_band_bounds(self, two_slit_solution):
        results = check_lemma_3_8(two_slit_solution)
        assert all(r.applicable for r in results)
        assert not violations(results)
        assert {"3.33", "3.34", "3.35", "3.36", "3.38"} == ids(results)

    def test_tall_slits_skip_local_estimates(self, two_slit_solution):
        results = check_theorem_3_3_and_3_5(two_slit_solution)
        local = [r for r in results if r.check_id in ("3.10", "3.11", "3.12")]
        assert local
        assert not any(r.applicable for r in local)


class TestRunChecks:
    """Planning, de-duplication and refinement of near-violations."""

    def test_full_plan_on_gapped_instance(self, gapped_solution):
        results = run_checks(gapped_solution, CheckPlan(refine=False))
        assert not violations(results)
        keys = [r.key for r in results]
        assert len(keys) == len(set(keys))

    def test_filter_limits_results(self, two_slit_solution):
        results = run_checks(two_slit_solution, CheckPlan(filters=("2.16",), refine=False))
        assert ids(results) == {"2.16"}
        assert len(results) == 2

    def test_near_violation_triggers_refined_rerun(self, single_slit_solution, mocker):
        resolve = mocker.Mock(return_value=single_slit_solution)
        plan = CheckPlan(p_values=(2.0,), filters=("1.3",))
        results = run_checks(single_slit_solution, plan, resolve=resolve)
        resolve.assert_called_once_with(single_slit_solution)
        assert results[0].note.endswith("refined")

    def test_no_rerun_without_near_violations(self, two_slit_solution, mocker):
        resolve = mocker.Mock()
        run_checks(two_slit_solution, CheckPlan(filters=("3.20",)), resolve=resolve)
        resolve.assert_not_called()

    def test_refinement_can_be_disabled(self, single_slit_solution, mocker):
        resolve = mocker.Mock()
        plan = CheckPlan(filters=("1.3",), refine=False)
        run_checks(single_slit_solution, plan, resolve=resolve)
        resolve.assert_not_called()


class TestLindelofResults:
    def test_report_becomes_results(self):
        report = LindelofReport(0.2, 0.5, True, [1], [0.9], [0.8], 0.01, 100)
        results = lindelof_results(report, "pair#0")
        assert [r.check_id for r in results] == ["2.26", "2.27", "2.23"]
        assert not violations(results)

    def test_strictness_failure_is_reported(self):
        report = LindelofReport(
            0.5, 0.5, True, [], [], [], 0.0, 100, violations=["2.26: Q0 not strictly smaller"]
        )
        (q0, margin) = lindelof_results(report, "pair#1")
        assert not q0.passed
        assert margin.passed
