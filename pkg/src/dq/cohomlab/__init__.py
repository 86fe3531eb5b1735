"""Cochains, coboundary operators, obstructions and Schouten checks."""

from .coboundary import (
    NotACocycle, Obstruction, agree_on_probes, apply_cochain, chevalley_d,
    coboundary_preimage, hochschild_b, obstruction_chevalley, obstruction_hochschild,
)
from .cochain import ArityError, MultiDiffOp, monomial_probes, probe_tuples, unit_index
from .schouten import Trivector, jacobi_trivector, poisson_series_check, schouten_pair, schouten_self

__all__ = [
    "ArityError", "MultiDiffOp", "monomial_probes", "probe_tuples", "unit_index",
    "NotACocycle", "Obstruction", "agree_on_probes", "apply_cochain", "chevalley_d",
    "coboundary_preimage", "hochschild_b", "obstruction_chevalley", "obstruction_hochschild",
    "Trivector", "jacobi_trivector", "poisson_series_check", "schouten_pair", "schouten_self",
]
