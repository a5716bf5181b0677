"""Centralized numerical tolerances.

A single immutable record holds the constants every validity check uses.
Callers that deliberately work with heavier truncation tails (large eta at
modest cutoffs) pass a loosened copy instead of mutating the default.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Tolerance constants for state validation.

    tol_herm: max elementwise deviation from hermiticity.
    tol_psd:  most negative eigenvalue still accepted as "positive".
    tail_tol: max admissible truncation-tail weight (norm or trace deficit).
    """

    tol_herm: float = 1e-12
    tol_psd: float = -1e-10
    tail_tol: float = 1e-8

    def with_tail(self, tail_tol: float) -> "Tolerances":
        return dataclasses.replace(self, tail_tol=tail_tol)


DEFAULT_TOL = Tolerances()
