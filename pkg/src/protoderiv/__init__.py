"""Numerical companion for a degenerate graphical limit of maximally monotone
operators on l2 and the directional differentiability of resolvents."""

from .seqspace import SparseVec, basis, norm, inner, axpy
from .operators import OperatorSpec, GraphPoint, eval_T, evaluate
from .resolvent import resolve, dd_probe, quotient_resolvent_identity_check

__all__ = [
    "SparseVec", "basis", "norm", "inner", "axpy",
    "OperatorSpec", "GraphPoint", "eval_T", "evaluate",
    "resolve", "dd_probe", "quotient_resolvent_identity_check",
]
__version__ = "0.1.0"
