"""Diagnostics for the graphical limit of B_m(x) = x + alpha*m*T(x/m).

A finite sample cannot certify a set limit in l2, so this module measures
the two mechanisms that force every cluster point of graph(B_m) to be
(0, 0): the residual ||B_m(x) - x|| is bounded below by |alpha|*||x||/2,
and the support of T(x/m) escapes to infinity as m grows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import GraphPoint, OperatorSpec, eval_T, evaluate, random_directions
from .seqspace import SparseVec, ZERO, axpy, basis, inner, norm, norm_sq

#: graph of the degenerate limit operator Z
ZERO_GRAPH = (GraphPoint(ZERO, ZERO),)


@dataclass(frozen=True)
class PointDiagnostic:
    x_norm: float
    residual_norm: float
    residual_lower_bound: float
    min_support_index: int | None
    predicted_support_floor: int | None


@dataclass(frozen=True)
class LimitDiagnostics:
    m: float
    sample: list[GraphPoint]
    points: list[PointDiagnostic]

    @property
    def contains_origin(self) -> bool:
        return any(p.x == ZERO and p.y == ZERO for p in self.sample)

    def residual_bound_holds(self, tol: float = 1e-12) -> bool:
        return all(d.residual_norm >= d.residual_lower_bound - tol
                   for d in self.points if d.x_norm <= self.m)

    def support_floor_holds(self) -> bool:
        return all(d.min_support_index >= max(1, d.predicted_support_floor)
                   for d in self.points if d.min_support_index is not None)


def sample_graph(alpha: float, m: float, radii: list[float], dirs_per_radius: int,
                 seed: int) -> list[GraphPoint]:
    """Seeded sample of graph(B_m); e_1 and e_2 are always among the directions."""
    spec = OperatorSpec.b_scaled(alpha, m)
    rng = np.random.default_rng(seed)
    dirs = [basis(1), basis(2)] + random_directions(rng, dirs_per_radius)
    points = []
    for r in radii:
        if r < 0:
            raise ValueError(f"radius must be nonnegative, got {r}")
        if r == 0:
            points.append(GraphPoint(ZERO, evaluate(spec, ZERO)))
            continue
        for u in dirs:
            x = r * u
            points.append(GraphPoint(x, evaluate(spec, x)))
    return points


def min_support_index(v: SparseVec) -> int | None:
    return min(v.support(), default=None)


def predicted_support_floor(x_norm: float, m: float) -> int | None:
    """floor(log2(m/||x||)) - 2, a lower bound on the indices T(x/m) can touch."""
    if x_norm == 0.0:
        return None
    return math.floor(math.log2(m / x_norm)) - 2


def diagnose(alpha: float, m: float, sample: list[GraphPoint]) -> LimitDiagnostics:
    points = []
    for p in sample:
        xn = norm(p.x)
        support = min_support_index(eval_T(p.x / m)) if xn > 0 else None
        points.append(PointDiagnostic(
            x_norm=xn,
            residual_norm=norm(p.y - p.x),
            residual_lower_bound=abs(alpha) * xn / 2.0,
            min_support_index=support,
            predicted_support_floor=predicted_support_floor(xn, m),
        ))
    return LimitDiagnostics(m, sample, points)


def outer_limit_diagnostic(alpha: float, m_list: list[float], radii: list[float] = (1.0, 0.5),
                           dirs_per_radius: int = 16, seed: int = 0,
                           include_origin: bool = True) -> list[LimitDiagnostics]:
    """Per-m diagnostics over the same seeded sample of points x."""
    if any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise ValueError("m_list must be strictly increasing")
    radii = list(radii)
    if include_origin and 0.0 not in radii:
        radii = [0.0] + radii
    # same seed for every m: a fixed set of points x followed through the family
    return [diagnose(alpha, m, sample_graph(alpha, m, radii, dirs_per_radius, seed))
            for m in m_list]


def scaled_residual(alpha: float, m: float, x: SparseVec) -> SparseVec:
    """B_m(x) - x = alpha*m*T(x/m)."""
    return evaluate(OperatorSpec.b_scaled(alpha, m), x) - x


def orthogonality_defect(alpha: float, m: float, m_prime: float, x: SparseVec) -> tuple[float, float]:
    """Return ``(||r - r'||^2, ||r||^2 + ||r'||^2)`` for the residuals at m and m'.

    For m' >= 8m the active windows are disjoint and the two agree.
    """
    r, rp = scaled_residual(alpha, m, x), scaled_residual(alpha, m_prime, x)
    return norm_sq(r - rp), norm_sq(r) + norm_sq(rp)


def proto_quotient(spec: OperatorSpec, x0: SparseVec, v0: SparseVec, tau: float,
                   w: SparseVec) -> SparseVec:
    """Difference quotient (B(x0 + tau*w) - v0)/tau of the proto-derivative."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    off = norm(v0 - evaluate(spec, x0))
    if off > 1e-12:
        raise ValueError(f"v0 is not B(x0): distance {off:g}")
    return (evaluate(spec, axpy(tau, w, x0)) - v0) / tau


def monotonically_related(point: GraphPoint, graph) -> bool:
    """True if <y - v, x - u> >= 0 for every (u, v) in ``graph``."""
    return all(inner(point.y - q.y, point.x - q.x) >= 0.0 for q in graph)


def in_graph(point: GraphPoint, graph) -> bool:
    return any(point.x == q.x and point.y == q.y for q in graph)


def non_maximality_witness(graph=ZERO_GRAPH, candidate: GraphPoint | None = None) -> GraphPoint | None:
    """Return ``candidate`` (default (e1, e1), a point of graph(Id)) if it
    extends ``graph`` monotonically without belonging to it."""
    if candidate is None:
        candidate = GraphPoint(basis(1), basis(1))
    if monotonically_related(candidate, graph) and not in_graph(candidate, graph):
        return candidate
    return None
