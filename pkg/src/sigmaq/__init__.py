"""Signed joint distributions, contextuality index and KS obstruction checks."""
from .behavior import Behavior, ContextTable, check_no_signaling, chsh_values
from .errors import SigmaqError
from .joint import (
    SignedJoint,
    SolutionFamily,
    assemble_constraints,
    marginalize,
    nonneg_feasible,
    solve_family,
    solve_min_l1,
)
from .ks import KSSet, cabello_set, parity_obstruction, search_noncontextual_valuation, verify_orthogonal_bases
from .numeric import Tolerances, tolerances
from .quantum import bell_behavior, pr_box_behavior, product_behavior, singlet_correlation
from .scenario import AtomSpace, Scenario, bell_scenario, build_atom_space, cyclic_triangle

__version__ = "0.1.0"

__all__ = [
    "AtomSpace", "Behavior", "ContextTable", "KSSet", "Scenario", "SigmaqError", "SignedJoint",
    "SolutionFamily", "Tolerances", "assemble_constraints", "bell_behavior", "bell_scenario",
    "build_atom_space", "cabello_set", "check_no_signaling", "chsh_values", "cyclic_triangle",
    "marginalize", "nonneg_feasible", "parity_obstruction", "pr_box_behavior", "product_behavior",
    "search_noncontextual_valuation", "singlet_correlation", "solve_family", "solve_min_l1",
    "tolerances", "verify_orthogonal_bases",
]
