#!/usr/bin/env python3
"""
Tests for derived per-slit quantities.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import math

import pytest

from comb_mapping.core.quantities import band_points, compute_quantities, minimal_band


class TestSingleSlitQuantities:
    """Every quantity of the single slit has a closed form."""

    @pytest.fixture
    def report(self, single_slit_solution):
        return compute_quantities(single_slit_solution)

    def test_gap_data(self, report):
        assert report.l[0] == pytest.approx(2.0, abs=1e-8)
        assert report.A[0] == pytest.approx(1.0, abs=1e-8)
        assert report.J[0] == pytest.approx(1.0, abs=1e-8)

    def test_energies(self, report):
        assert report.Q0 == pytest.approx(0.5, abs=1e-8)
        assert report.ID == pytest.approx(1.0, abs=1e-8)
        assert report.S == pytest.approx(math.pi, abs=1e-7)

    def test_masses(self, report):
        assert report.mu_plus[0] == pytest.approx(1.0, abs=1e-8)
        assert report.mu_minus[0] == pytest.approx(1.0, abs=1e-8)
        assert report.nu[0] == pytest.approx(1.0, abs=1e-8)
        assert report.mu_signs == (-1, 1)

    def test_lengths(self, report):
        assert report.L[0] == pytest.approx(2.0 * math.pi, abs=1e-7)
        assert report.e[0] == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-9)
        assert report.d[0] == pytest.approx(0.25, abs=1e-9)

    def test_no_band_for_one_slit(self, report, single_slit_solution):
        assert report.s is None
        assert minimal_band(single_slit_solution) is None
        assert report.to_dict()["u_star"] is None


class TestMultiSlitQuantities:
    def test_identity_between_energies(self, two_slit_solution):
        report = compute_quantities(two_slit_solution)
        assert report.ID == pytest.approx(sum(report.A), rel=1e-9)
        assert report.ID == pytest.approx(sum(j * j for j in report.J), rel=1e-9)

    def test_minimal_band_below_spacing(self, two_slit_solution):
        report = compute_quantities(two_slit_solution)
        assert 0.0 < report.s <= two_slit_solution.config.u_star
        assert report.s == pytest.approx(report.band_lengths[0])

    def test_empty_slit_splits_band(self, gapped_solution):
        pieces = band_points(gapped_solution)
        assert len(pieces) == 3
        x, y = pieces[1]
        assert x == y
        assert gapped_solution.gaps.z_plus[0] < x < gapped_solution.gaps.z_minus[1]
        assert minimal_band(gapped_solution) <= gapped_solution.config.u_star

    def test_empty_slit_carries_zeros(self, gapped_solution):
        report = compute_quantities(gapped_solution)
        assert report.l[1] == 0.0
        assert report.A[1] == 0.0
        assert report.u_computed[1] == 1.0

    def test_rows(self, two_slit_solution):
        rows = compute_quantities(two_slit_solution).rows()
        assert [row["n"] for row in rows] == [0, 1]
        assert set(rows[0]) >= {"u", "h", "l", "A", "J", "mu+", "mu-", "nu", "L", "e", "d"}
