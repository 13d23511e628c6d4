"""Resolvents J = (Id + B)^-1 and the directional-derivative probe.

Catalog entries with closed-form resolvents are evaluated directly.  For
B = Id + alpha*T the equation 2x + alpha*T(x) = y is solved by the
fixed-point map x <- (y - alpha*T(x))/2, a contraction with factor
q = |alpha|*sqrt(17)/4 <= 1/2, stopped by the geometric-series bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .operators import LIP_T, OperatorSpec, eval_T, evaluate
from .seqspace import SparseVec, ZERO, axpy, norm

#: relative size of one evaluation of the fixed-point map's rounding error
ROUNDING = 2.0 ** -50
DEFAULT_MAX_ITER = 5000

CONV_TOL = 1e-6
WINDOW = 5
OSC_FLOOR_REL = 1e-3


class ResolventError(RuntimeError):
    """The resolvent could not be computed to the requested accuracy."""


@dataclass(frozen=True)
class SolveReport:
    solution: SparseVec
    iterations: int
    residual: float
    certified_error: float


# -- contraction machinery ---------------------------------------------------

def contraction_factor(alpha: float) -> float:
    return abs(alpha) * LIP_T / 2.0


def _contract(rhs: SparseVec, pert: Callable[[SparseVec], SparseVec], q: float,
              eps: float, max_iter: int = DEFAULT_MAX_ITER) -> tuple[SparseVec, int, float]:
    """Solve 2x + pert(x) = rhs where pert is (2q)-Lipschitz, q < 1.

    Returns ``(x, iterations, certified_error)``.  The certified error is
    the a-priori bound q/(1-q)*step plus the propagated rounding of the map.
    """
    if not q < 1.0:
        raise ResolventError(f"contraction factor {q} >= 1; alpha is misconfigured")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    rhs_norm = norm(rhs)
    x = 0.5 * rhs
    for it in range(1, max_iter + 1):
        p = pert(x)
        x_new = 0.5 * axpy(-1.0, p, rhs)
        step = norm(x_new - x)
        floor = ROUNDING * (rhs_norm + norm(x) + norm(p))
        x = x_new
        # geometric-series bound q/(1-q)*step, plus rounding of the map
        bound = (q * step + floor) / (1.0 - q)
        if bound <= eps:
            return x, it, bound
        if step <= floor:
            # stalled at rounding level before reaching eps
            raise ResolventError(
                f"eps={eps:g} is below the attainable accuracy {floor / (1.0 - q):g} "
                f"for a right-hand side of norm {rhs_norm:g}"
            )
    raise ResolventError(f"iteration cap {max_iter} exceeded (q={q}, eps={eps:g})")


def attainable_accuracy(spec: OperatorSpec, y: SparseVec) -> float:
    """Rough rounding floor of the iterative solvers at right-hand side ``y``."""
    if spec.tag not in ("BAlpha", "BScaled"):
        return 0.0
    q = contraction_factor(spec.alpha)
    return 2.0 * ROUNDING * norm(y) * (2.0 + abs(spec.alpha) * LIP_T) / (1.0 - q)


# -- closed forms ------------------------------------------------------------

def _soft_threshold(c: float) -> float:
    if c > 1.0:
        return c - 1.0
    if c < -1.0:
        return c + 1.0
    return 0.0


def _closed_form(spec: OperatorSpec, y: SparseVec) -> SparseVec:
    if spec.tag == "LinearScalar":
        return y / (1.0 + spec.lam)
    entries = dict(y.entries)
    c = entries.pop(1, 0.0)
    c = _soft_threshold(c) if spec.tag == "SoftThreshGen" else max(c, 0.0)
    if c != 0.0:
        entries[1] = c
    return SparseVec(entries)


def _closed_form_residual(spec: OperatorSpec, x: SparseVec, y: SparseVec) -> float:
    """Distance from y - x to B(x) for the closed-form catalog entries."""
    if spec.tag == "LinearScalar":
        return norm(axpy(1.0 + spec.lam, x, -y))
    r = y - x
    c, x1 = r[1], x[1]
    if spec.tag == "SoftThreshGen":
        # subdifferential of |.| at x1
        lo, hi = (-1.0, 1.0) if x1 == 0.0 else (math.copysign(1.0, x1),) * 2
    else:
        # normal cone of [0, inf) at x1
        lo, hi = (-math.inf, 0.0) if x1 == 0.0 else (0.0, 0.0)
    off = c - min(max(c, lo), hi)
    rest = SparseVec({i: v for i, v in r.items() if i != 1})
    return math.hypot(off, norm(rest))


# -- public solvers ----------------------------------------------------------

def _solve_b_alpha(alpha: float, y: SparseVec, eps: float, max_iter: int) -> tuple[SparseVec, int, float]:
    return _contract(y, lambda x: alpha * eval_T(x), contraction_factor(alpha), eps, max_iter)


def resolve(spec: OperatorSpec, y: SparseVec, eps: float = 1e-12,
            max_iter: int = DEFAULT_MAX_ITER) -> SolveReport:
    """Compute J_B(y) for a catalog operator."""
    if spec.closed_form_resolvent:
        x = _closed_form(spec, y)
        return SolveReport(x, 0, _closed_form_residual(spec, x, y),
                           2.0 ** -52 * norm(x))
    if spec.tag == "BAlpha":
        x, it, err = _solve_b_alpha(spec.alpha, y, eps, max_iter)
    elif spec.tag == "BScaled":
        # J_{B_m}(y) = m * J_B(y/m)
        m = spec.m
        xs, it, err = _solve_b_alpha(spec.alpha, y / m, eps / m, max_iter)
        x, err = m * xs, m * err
    else:
        raise ResolventError(
            f"no resolvent procedure for {spec.tag}; T alone is not monotone, "
            "use BAlpha(alpha) for Id + alpha*T"
        )
    residual = norm(axpy(-1.0, y, x + evaluate(spec, x)))
    return SolveReport(x, it, residual, err)


# -- finite-tau identity -----------------------------------------------------

@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of (J(y + tau*h) - J(y))/tau = J_{D_tau}(h)."""

    lhs: SparseVec
    rhs: SparseVec
    discrepancy: float
    error_budget: float


def identity_parts(spec: OperatorSpec, y: SparseVec, h: SparseVec, tau: float,
                   eps: float = 1e-12, rhs_eps: float | None = None) -> IdentityCheck:
    """Evaluate both sides of the finite-tau resolvent identity.

    ``D_tau(w) = (B(x + tau*w) - (y - x))/tau`` with ``x = J(y)`` is the
    proto-derivative difference quotient of B at x relative to y - x.
    ``eps`` is the accuracy of the two resolvents of B (their error is
    amplified by 1/tau); ``rhs_eps`` that of the resolvent of D_tau.
    """
    if rhs_eps is None:
        rhs_eps = eps
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if not spec.single_valued:
        raise ResolventError(f"{spec.tag} is set-valued; the identity check needs B(x + tau*w)")
    base = resolve(spec, y, eps)
    moved = resolve(spec, axpy(tau, h, y), eps)
    x = base.solution
    lhs = (moved.solution - x) / tau

    if spec.tag == "LinearScalar":
        lam = spec.lam
        shift = axpy(1.0 + lam, x, -y) / tau
        rhs = (h - shift) / (1.0 + lam)
        rhs_err = 2.0 ** -52 * (norm(rhs) + norm(shift))
    elif spec.tag in ("BAlpha", "BScaled"):
        alpha = spec.alpha
        m = 1.0 if spec.tag == "BAlpha" else spec.m
        # B = Id + G with G(z) = alpha*m*T(z/m):
        # 2w + (2x - y + G(x + tau*w))/tau = h
        offset = axpy(2.0, x, -y) / tau

        def pert(w: SparseVec) -> SparseVec:
            z = axpy(tau, w, x)
            return ((alpha * m) * eval_T(z / m)) / tau

        rhs, _, rhs_err = _contract(h - offset, pert, contraction_factor(alpha), rhs_eps)
    else:
        raise ResolventError(f"no proto-quotient resolvent for {spec.tag}")
    budget = (base.certified_error + moved.certified_error) / tau + rhs_err
    return IdentityCheck(lhs, rhs, norm(lhs - rhs), budget)


def quotient_resolvent_identity_check(spec: OperatorSpec, y: SparseVec, h: SparseVec,
                                      tau: float, eps: float = 1e-12) -> float:
    """Return ||(J(y + tau*h) - J(y))/tau - J_{D_tau}(h)||."""
    return identity_parts(spec, y, h, tau, eps).discrepancy


# -- directional derivative probe ---------------------------------------------

@dataclass(frozen=True)
class QuotientTrace:
    tau_grid: list[float]
    quotients: list[SparseVec]
    window_spreads: list[float]
    tail_spread: float
    verdict: str
    limit: SparseVec | None = None
    ks: list[int] = field(default_factory=list)
    note: str = ""


def _spread(vecs: list[SparseVec]) -> float:
    return max((norm(u - v) for i, u in enumerate(vecs) for v in vecs[i + 1:]), default=0.0)


def window_spreads(quotients: list[SparseVec], window: int = WINDOW) -> list[float]:
    """Max pairwise distance inside every run of ``window`` consecutive quotients."""
    return [_spread(quotients[j:j + window]) for j in range(len(quotients) - window + 1)]


def dd_probe(spec: OperatorSpec, y: SparseVec, h: SparseVec, k_min: int, k_max: int, *,
             quot_tol: float = 1e-9, window: int = WINDOW, conv_tol: float = CONV_TOL,
             osc_floor: float | None = None) -> QuotientTrace:
    """Sample (J(y + tau*h) - J(y))/tau on tau = 2^-k, k = k_min..k_max.

    Verdicts: ``converged`` when the last window's spread is at most
    ``conv_tol``; ``oscillating`` when every window's spread is at least
    ``osc_floor`` (default 1e-3*||h||); ``inconclusive`` otherwise, or when
    solver accuracy cannot support the grid depth.
    """
    h_norm = norm(h)
    if h_norm == 0.0:
        raise ValueError("direction h must be nonzero")
    if k_max < k_min:
        raise ValueError(f"empty tau grid k={k_min}..{k_max}")
    if osc_floor is None:
        osc_floor = OSC_FLOOR_REL * h_norm
    ks = list(range(k_min, k_max + 1))
    taus = [math.ldexp(1.0, -k) for k in ks]

    def eps_for(tau: float) -> float:
        # two resolvent errors enter each quotient
        return 0.5 * tau * quot_tol

    note = ""
    quotients: list[SparseVec] = []
    try:
        for tau in taus:
            if eps_for(tau) < attainable_accuracy(spec, axpy(tau, h, y)):
                raise ResolventError(f"tau={tau:g} needs accuracy below the rounding floor")
        base = resolve(spec, y, eps_for(taus[-1])).solution
        for tau in taus:
            moved = resolve(spec, axpy(tau, h, y), eps_for(tau)).solution
            quotients.append((moved - base) / tau)
    except ResolventError as exc:
        note = str(exc)

    if note or len(quotients) < window:
        note = note or f"fewer than {window} grid points"
        return QuotientTrace(taus[:len(quotients)], quotients, [], math.nan,
                             "inconclusive", None, ks[:len(quotients)], note)

    spreads = window_spreads(quotients, window)
    tail = spreads[-1]
    if tail <= conv_tol:
        verdict, limit = "converged", quotients[-1]
    elif all(s >= osc_floor for s in spreads):
        verdict, limit = "oscillating", None
    else:
        verdict, limit = "inconclusive", None
    return QuotientTrace(taus, quotients, spreads, tail, verdict, limit, ks, note)
