#!/usr/bin/env python3
"""
Verification harness: inequality checks, worked examples and seeded ensembles.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

from .checks import (
    ALL_CHECK_IDS,
    CheckPlan,
    CheckResult,
    check_capacity,
    check_gap_identities,
    check_lemma_3_8,
    check_prop_3_6,
    check_theorem_1_1,
    check_theorem_1_2,
    check_theorem_1_5,
    check_theorem_3_3_and_3_5,
    run_checks,
)
from .ensemble import EnsembleReport, EnsembleSpec, run_ensemble
from .examples import counterexample_convergence, reproduce_example
from .report import results_table, to_json

__all__ = [
    "ALL_CHECK_IDS",
    "CheckPlan",
    "CheckResult",
    "EnsembleReport",
    "EnsembleSpec",
    "check_capacity",
    "check_gap_identities",
    "check_lemma_3_8",
    "check_prop_3_6",
    "check_theorem_1_1",
    "check_theorem_1_2",
    "check_theorem_1_5",
    "check_theorem_3_3_and_3_5",
    "counterexample_convergence",
    "reproduce_example",
    "results_table",
    "run_checks",
    "run_ensemble",
    "to_json",
]
