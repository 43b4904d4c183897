"""Verification lab for PT-invariant nineteen-vertex models."""

from .errors import (BudgetError, ComplexEnergyError, ConfigError,
                     DegenerateWeightError, NoConvergenceError, PoleError,
                     SeedError, VlabError)
from .weights import (Branch, BranchParams, InvariantSet, WeightSet,
                      check_elimination_identities,
                      check_invariant_constraints, compute_invariants,
                      conic_residual, make_weights, parameterize_conic,
                      reconstruct_dependent_weights, reference_invariants)

__version__ = "0.1.0"

__all__ = [
    "Branch", "BranchParams", "InvariantSet", "WeightSet",
    "make_weights", "compute_invariants", "reference_invariants",
    "check_invariant_constraints", "check_elimination_identities",
    "reconstruct_dependent_weights", "conic_residual", "parameterize_conic",
    "VlabError", "PoleError", "DegenerateWeightError", "BudgetError",
    "NoConvergenceError", "SeedError", "ComplexEnergyError", "ConfigError",
    "__version__",
]
