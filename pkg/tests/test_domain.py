#!/usr/bin/env python3
"""
Tests for slit configurations, gap systems and weighted norms.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import math

import numpy as np
import pytest

from comb_mapping.domain import (
    GapSystem,
    NormSpec,
    SlitConfig,
    greedy_energy_bounds,
    greedy_tilde,
    lp_norm,
    validate,
    weighted_norm,
)
from comb_mapping.exceptions import (
    EmptyConfig,
    InputError,
    InvalidInterlacing,
    InvalidWeights,
    LengthMismatch,
    NegativeHeight,
    NonFiniteValue,
    NonIncreasingPositions,
)


class TestSlitConfig:
    """Validation and derived properties of slit configurations."""

    def test_validate_accepts_increasing_positions(self):
        config = validate([0, 1.5, 4], [1, 0, 2])
        assert config.size == 3
        assert config.u_star == pytest.approx(1.5)
        assert config.max_height == 2.0

    @pytest.mark.parametrize(
        "u, h, error",
        [
            ([0, 0], [1, 1], NonIncreasingPositions),
            ([1, 0], [1, 1], NonIncreasingPositions),
            ([0, 1], [1, -0.1], NegativeHeight),
            ([], [], EmptyConfig),
            ([0, 1], [1], LengthMismatch),
            ([0, math.nan], [1, 1], NonFiniteValue),
            ([0, 1], [1, math.inf], NonFiniteValue),
        ],
    )
    def test_validate_rejects_bad_input(self, u, h, error):
        with pytest.raises(error):
            validate(u, h)

    def test_input_errors_share_exit_code(self):
        with pytest.raises(InputError) as excinfo:
            validate([0, 0], [1, 1])
        assert excinfo.value.exit_code == 2

    def test_single_slit_has_infinite_spacing(self):
        assert math.isinf(SlitConfig((3.0,), (1.0,)).u_star)

    def test_scaled_keeps_positions(self):
        config = SlitConfig((0.0, 1.0), (1.0, 2.0)).scaled(0.5)
        assert config.u == (0.0, 1.0)
        assert config.h == (0.5, 1.0)

    def test_trivial_configuration(self):
        assert SlitConfig((0.0, 1.0), (0.0, 0.0)).is_trivial
        assert not SlitConfig((0.0, 1.0), (0.0, 0.1)).is_trivial

    def test_to_dict(self):
        assert SlitConfig((0, 1), (2, 3)).to_dict() == {"u": [0.0, 1.0], "h": [2.0, 3.0]}


class TestGapSystem:
    """Interlacing rules of gap systems."""

    def test_lengths_and_bands(self):
        gaps = GapSystem((-3.0, 1.0), (-1.0, 4.0))
        np.testing.assert_allclose(gaps.lengths, [2.0, 3.0])
        np.testing.assert_allclose(gaps.band_lengths, [2.0])
        assert gaps.slits == (0, 1)

    def test_overlapping_gaps_rejected(self):
        with pytest.raises(InvalidInterlacing):
            GapSystem((0.0, 0.5), (1.0, 2.0))

    def test_non_finite_endpoint_rejected(self):
        with pytest.raises(NonFiniteValue) as excinfo:
            GapSystem((-math.inf,), (1.0,))
        assert excinfo.value.exit_code == 2

    def test_empty_gap_rejected(self):
        with pytest.raises(InvalidInterlacing):
            GapSystem((1.0,), (1.0,))

    def test_critical_point_must_lie_inside(self):
        with pytest.raises(InvalidInterlacing):
            GapSystem((0.0,), (1.0,), c=(1.0,))

    def test_critical_point_count_must_match(self):
        with pytest.raises(LengthMismatch):
            GapSystem((0.0, 2.0), (1.0, 3.0), c=(0.5,))

    def test_scaled_scales_every_point(self):
        gaps = GapSystem((0.0,), (2.0,), c=(1.0,)).scaled(3.0)
        assert gaps.z_plus == (6.0,)
        assert gaps.c == (3.0,)


class TestNorms:
    """Weighted l^p norms."""

    def test_unit_weights(self):
        assert weighted_norm([3.0, -4.0], NormSpec(2.0)) == pytest.approx(5.0)
        assert lp_norm([1.0, 2.0, 3.0], 1.0) == pytest.approx(6.0)

    def test_weights_scale_entries(self):
        assert weighted_norm([3.0, 4.0], NormSpec(1.0, (1.0, 4.0))) == pytest.approx(19.0)

    def test_sup_norm_ignores_weights(self):
        assert weighted_norm([3.0, -7.0], NormSpec(math.inf, (5.0, 1.0))) == 7.0

    def test_large_exponent_stays_finite(self):
        assert weighted_norm([1e10, 1e10], NormSpec(60.0)) == pytest.approx(1e10 * 2 ** (1 / 60))

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, math.inf])
    def test_norm_is_positively_homogeneous(self, p):
        seq = [0.3, -1.2, 0.7]
        spec = NormSpec(p, (1.0, 2.5, 9.0))
        scaled = weighted_norm([3.5 * x for x in seq], spec)
        assert scaled == pytest.approx(3.5 * weighted_norm(seq, spec), rel=1e-12)

    def test_weighted_norm_dominates_unit_norm(self):
        seq = [0.3, 1.2, 0.7]
        weights = (1.0, 2.5, 9.0)
        for p in (1.0, 1.5, 2.0):
            assert weighted_norm(seq, NormSpec(p, weights)) >= lp_norm(seq, p)

    def test_invalid_specs(self):
        with pytest.raises(InvalidWeights):
            NormSpec(0.5)
        with pytest.raises(InvalidWeights):
            NormSpec(2.0, (1.0, 0.5))

    def test_weight_count_must_match(self):
        with pytest.raises(LengthMismatch):
            weighted_norm([1.0, 2.0], NormSpec(2.0, (1.0,)))

    def test_conjugate_exponents(self):
        assert NormSpec(2.0).conjugate == 2.0
        assert math.isinf(NormSpec(1.0).conjugate)
        assert NormSpec(math.inf).conjugate == 1.0
        assert NormSpec(3.0).conjugate == pytest.approx(1.5)


class TestGreedySelection:
    """Exclusion-window selection of dominant slits."""

    def test_windows_exclude_neighbours(self):
        config = SlitConfig((0.0, 1.0, 2.0), (1.0, 0.5, 1.0))
        np.testing.assert_allclose(greedy_tilde(config), [1.0, 0.0, 1.0])

    def test_ties_pick_smallest_index(self):
        config = SlitConfig((0.0, 0.5), (1.0, 1.0))
        np.testing.assert_allclose(greedy_tilde(config), [1.0, 0.0])

    def test_tall_slit_shadows_short_ones(self):
        config = SlitConfig((0.0, 1.0, 2.0, 5.0), (0.2, 3.0, 0.2, 0.4))
        np.testing.assert_allclose(greedy_tilde(config), [0.0, 3.0, 0.0, 0.4])

    def test_empty_configuration_selects_nothing(self):
        assert not greedy_tilde(SlitConfig((0.0, 1.0), (0.0, 0.0))).any()

    def test_single_slit_energy_bounds(self):
        lower, upper = greedy_energy_bounds(SlitConfig((0.0,), (1.0,)))
        assert lower == pytest.approx(1.0 / math.pi**2)
        assert upper == pytest.approx(2.0 * math.sqrt(2.0) / math.pi)
        assert lower < 0.5 < upper
