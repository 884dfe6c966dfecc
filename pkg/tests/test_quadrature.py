#!/usr/bin/env python3
"""
Tests for the composite Gauss-Legendre rules.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import math

import numpy as np
import pytest

from comb_mapping.core.quadrature import (
    GRADE_BOTH,
    GRADE_LEFT,
    GRADE_RIGHT,
    QuadratureSettings,
    angular_distance,
    gauss_legendre,
    graded_rule,
    grading_levels,
    panel_rule,
)


class TestGaussLegendre:
    def test_polynomials_integrated_exactly(self):
        t, w = gauss_legendre(5)
        assert w.sum() == pytest.approx(1.0, abs=1e-15)
        assert np.dot(w, t**9) == pytest.approx(0.1, abs=1e-14)

    def test_rules_are_read_only(self):
        t, _ = gauss_legendre(4)
        with pytest.raises(ValueError):
            t[0] = 0.0


class TestGradedRules:
    """Geometric grading toward singular ends."""

    @pytest.mark.parametrize("grade", [GRADE_BOTH, GRADE_LEFT, GRADE_RIGHT])
    def test_weights_sum_to_one(self, grade):
        t, w = graded_rule(12, 0.25, 8, grade)
        assert w.sum() == pytest.approx(1.0, abs=1e-13)
        assert np.all((t > 0) & (t < 1))

    def test_inverse_square_root_end(self):
        t, w = graded_rule(20, 0.25, 16, GRADE_LEFT)
        assert np.dot(w, t**-0.5) == pytest.approx(2.0, abs=1e-6)

    def test_right_grading_mirrors_left(self):
        t_left, w_left = graded_rule(6, 0.25, 4, GRADE_LEFT)
        t_right, w_right = graded_rule(6, 0.25, 4, GRADE_RIGHT)
        np.testing.assert_allclose(np.sort(1.0 - t_left), np.sort(t_right), atol=1e-15)

    def test_panel_rule(self):
        t, w = panel_rule(3, 6)
        assert np.dot(w, np.exp(t)) == pytest.approx(math.e - 1.0, abs=1e-14)


class TestGradingLevels:
    def test_far_singularity_needs_one_level(self):
        assert grading_levels(1.0, 0.5, 0.25, 40) == 1

    def test_closer_singularity_needs_more_levels(self):
        near = grading_levels(1e-6, 0.5, 0.25, 40)
        nearer = grading_levels(1e-9, 0.5, 0.25, 40)
        assert 1 < near < nearer <= 40

    def test_touching_singularity_uses_cap(self):
        assert grading_levels(0.0, 0.5, 0.25, 17) == 17

    def test_angular_distance(self):
        assert angular_distance(0.0, 1.0) == 0.0
        assert angular_distance(1.0, 1.0) == pytest.approx(math.acosh(2.0))


class TestQuadratureSettings:
    def test_refined_doubles_nodes(self):
        settings = QuadratureSettings(nodes_per_panel=12, tail_nodes=10)
        refined = settings.refined()
        assert refined.nodes_per_panel == 24
        assert refined.tail_nodes == 20
        assert refined.closure_tol == settings.closure_tol
