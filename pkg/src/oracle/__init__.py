"""Brute-force ground truth for small instances.

This package provides:
- Explicit enumeration of the legitimate state space
- Generator construction and the global-balance linear solve
- Detailed-balance and product-form audits under a dense-memory budget
- Direct enumeration of the coefficients c_b
"""

from .states import StateIndex, StateSpace, enumerate_states, estimate_state_count
from .generator import (
    BalanceViolation,
    GeneratorMatrix,
    VerificationSummary,
    aggregate_by_total,
    audit_detailed_balance,
    build_generator,
    check_dense_memory,
    coefficient_discrepancy,
    dense_memory_mb,
    detailed_balance_residual,
    global_balance_residual,
    product_form_discrepancy,
    solve_global_balance,
    verify_scenario,
)
from .enumeration import enumerate_all_c, enumerate_c

__all__ = [
    "StateIndex",
    "StateSpace",
    "enumerate_states",
    "estimate_state_count",
    "BalanceViolation",
    "GeneratorMatrix",
    "VerificationSummary",
    "aggregate_by_total",
    "audit_detailed_balance",
    "build_generator",
    "check_dense_memory",
    "coefficient_discrepancy",
    "dense_memory_mb",
    "detailed_balance_residual",
    "global_balance_residual",
    "product_form_discrepancy",
    "solve_global_balance",
    "verify_scenario",
    "enumerate_all_c",
    "enumerate_c",
]
