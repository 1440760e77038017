"""Identification of 1D scalar evolution PDEs from noisy trajectory data.

The package combines weak-form sparse regression with two automatic
library-reduction mechanisms: a data-driven Galilean-invariance test
that prunes reaction terms, and randomized-LASSO stability selection
for everything else, guarded by a residual fallback to the full-library
fit. A benchmark harness reproduces the eight-PDE, four-noise-level
evaluation grid.
"""

from .core import (
    CoefficientVector,
    Grid1D,
    LibraryTerm,
    STANDARD_TERMS,
    Trajectory,
    TrajectorySet,
    coefficient_error,
    f1_score,
    support_from_coeffs,
    term_from_tag,
)
from .oplib import (
    LibrarySpec,
    evaluate_term,
    expanded_library,
    galilean_reduced,
    odd_reflection_prune,
    standard_library,
)
from .pipeline import IdentificationResult, run_eqod, run_wf_lasso_baseline
from .solvers import PDES, PdeSpec, RngStream, add_noise, generate_set, initial_condition, solve
from .sparse import IdentifyConfig, LassoConfig, lasso, lasso_cv, wf_lasso_identify
from .stability import StabilityConfig, stability_gate, stability_select
from .symmetry import SymmetryReport, detect_all, detect_galilean, estimate_symbol
from .weakform import TestGrid, WeakSystem, assemble, bump, make_test_grid

__version__ = "0.1.0"

__all__ = [
    "CoefficientVector",
    "Grid1D",
    "IdentificationResult",
    "IdentifyConfig",
    "LassoConfig",
    "LibrarySpec",
    "LibraryTerm",
    "PDES",
    "PdeSpec",
    "RngStream",
    "STANDARD_TERMS",
    "StabilityConfig",
    "SymmetryReport",
    "TestGrid",
    "Trajectory",
    "TrajectorySet",
    "WeakSystem",
    "add_noise",
    "assemble",
    "bump",
    "coefficient_error",
    "detect_all",
    "detect_galilean",
    "estimate_symbol",
    "evaluate_term",
    "expanded_library",
    "f1_score",
    "galilean_reduced",
    "generate_set",
    "initial_condition",
    "lasso",
    "lasso_cv",
    "make_test_grid",
    "odd_reflection_prune",
    "run_eqod",
    "run_wf_lasso_baseline",
    "solve",
    "stability_gate",
    "stability_select",
    "standard_library",
    "support_from_coeffs",
    "term_from_tag",
    "wf_lasso_identify",
]
