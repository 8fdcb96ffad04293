from pilab.diffpoly.ring import DiffPoly, evaluate, partial, q, s, t, total_derivative
from pilab.diffpoly.hierarchy import (
    FlowEquation,
    HierarchyEquation,
    apply_lenard_operator,
    generate_equation,
    generate_kdv_flow,
    integrate_total_derivative,
    lenard,
    lenard_sequence,
)
from pilab.diffpoly.lax import LaxPolynomial, assemble_beta, verify_lax_identities

__all__ = [
    "DiffPoly", "evaluate", "partial", "q", "s", "t", "total_derivative",
    "FlowEquation", "HierarchyEquation", "apply_lenard_operator",
    "generate_equation", "generate_kdv_flow", "integrate_total_derivative",
    "lenard", "lenard_sequence",
    "LaxPolynomial", "assemble_beta", "verify_lax_identities",
]
