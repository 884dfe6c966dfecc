#!/usr/bin/env python3
"""
Pytest configuration and fixtures.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_ROOT = PROJECT_ROOT / "src"
if SRC_ROOT.exists():
    sys.path.insert(0, str(SRC_ROOT))
if str(PROJECT_ROOT) not in sys.path:
    sys.path.append(str(PROJECT_ROOT))

from comb_mapping.core.forward_solver import solve_forward  # noqa: E402
from comb_mapping.domain import SlitConfig  # noqa: E402


@pytest.fixture(scope="session")
def single_slit_config():
    """One slit of height 1 at the origin; its map is sqrt(k^2 + 1)."""
    return SlitConfig((0.0,), (1.0,))


@pytest.fixture(scope="session")
def single_slit_solution(single_slit_config):
    return solve_forward(single_slit_config)


@pytest.fixture(scope="session")
def two_slit_config():
    return SlitConfig((0.0, 2.0), (0.6, 1.0))


@pytest.fixture(scope="session")
def two_slit_solution(two_slit_config):
    return solve_forward(two_slit_config)


@pytest.fixture(scope="session")
def gapped_config():
    """Three slits whose middle one is empty."""
    return SlitConfig((0.0, 1.0, 2.5), (0.5, 0.0, 0.8))


@pytest.fixture(scope="session")
def gapped_solution(gapped_config):
    return solve_forward(gapped_config)
