"""The counterexample operator T, the families B = Id + alpha*T and
B_m(x) = m*B(x/m), comparison operators, and sampled Lipschitz and
monotonicity checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bumps
from .seqspace import SparseVec, ZERO, axpy, inner, norm

SQRT17_HALF = math.sqrt(17.0) / 2.0
#: Lipschitz bound of T
LIP_T = SQRT17_HALF
#: largest |alpha| for which Id + alpha*T is maximally monotone
ALPHA_MAX = 2.0 / math.sqrt(17.0)

TAGS = ("CounterT", "BAlpha", "BScaled", "LinearScalar", "SoftThreshGen", "HalfLineNormalCone")
SINGLE_VALUED = frozenset({"CounterT", "BAlpha", "BScaled", "LinearScalar"})
CLOSED_FORM_RESOLVENT = frozenset({"LinearScalar", "SoftThreshGen", "HalfLineNormalCone"})


class SetValuedError(TypeError):
    """Pointwise evaluation was requested for a set-valued operator."""


@dataclass(frozen=True)
class OperatorSpec:
    """Catalog entry for one operator.

    Use the named constructors; ``BScaled(alpha, 1/tau)`` doubles as the
    proto-derivative difference quotient of ``BAlpha(alpha)`` at the origin.
    """

    tag: str
    alpha: float | None = None
    m: float | None = None
    lam: float | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown operator tag {self.tag!r}")
        if self.tag in ("BAlpha", "BScaled"):
            if self.alpha is None or not math.isfinite(self.alpha):
                raise ValueError(f"{self.tag} needs a finite alpha")
            if abs(self.alpha) > ALPHA_MAX:
                raise ValueError(
                    f"|alpha| = {abs(self.alpha)!r} exceeds 2/sqrt(17) = {ALPHA_MAX!r}; "
                    "Id + alpha*T is not known to be maximally monotone there"
                )
        if self.tag == "BScaled":
            if self.m is None or not (self.m > 0 and math.isfinite(self.m)):
                raise ValueError(f"BScaled needs m > 0, got {self.m!r}")
        if self.tag == "LinearScalar":
            if self.lam is None or not (self.lam >= 0 and math.isfinite(self.lam)):
                raise ValueError(f"LinearScalar needs lambda >= 0, got {self.lam!r}")

    @classmethod
    def counter_t(cls) -> OperatorSpec:
        return cls("CounterT")

    @classmethod
    def b_alpha(cls, alpha: float) -> OperatorSpec:
        return cls("BAlpha", alpha=float(alpha))

    @classmethod
    def b_scaled(cls, alpha: float, m: float) -> OperatorSpec:
        return cls("BScaled", alpha=float(alpha), m=float(m))

    @classmethod
    def b_tau(cls, alpha: float, tau: float) -> OperatorSpec:
        """The quotient family B_tau(x) = B(tau*x)/tau, i.e. BScaled with m = 1/tau."""
        if not tau > 0:
            raise ValueError(f"tau must be positive, got {tau!r}")
        return cls.b_scaled(alpha, 1.0 / tau)

    @classmethod
    def linear(cls, lam: float) -> OperatorSpec:
        return cls("LinearScalar", lam=float(lam))

    @classmethod
    def soft_thresh(cls) -> OperatorSpec:
        return cls("SoftThreshGen")

    @classmethod
    def half_line_cone(cls) -> OperatorSpec:
        return cls("HalfLineNormalCone")

    @property
    def single_valued(self) -> bool:
        return self.tag in SINGLE_VALUED

    @property
    def closed_form_resolvent(self) -> bool:
        return self.tag in CLOSED_FORM_RESOLVENT

    @property
    def lipschitz(self) -> float:
        """A Lipschitz constant of the operator (inf for set-valued entries)."""
        if self.tag == "CounterT":
            return LIP_T
        if self.tag in ("BAlpha", "BScaled"):
            return 1.0 + abs(self.alpha) * LIP_T
        if self.tag == "LinearScalar":
            return self.lam
        return math.inf

    def to_json_obj(self) -> dict:
        obj: dict = {"tag": self.tag}
        if self.alpha is not None:
            obj["alpha"] = self.alpha
        if self.m is not None:
            obj["m"] = self.m
        if self.lam is not None:
            obj["lambda"] = self.lam
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> OperatorSpec:
        unknown = set(obj) - {"tag", "alpha", "m", "lambda"}
        if unknown:
            raise ValueError(f"unknown operator fields: {sorted(unknown)}")
        tag = obj["tag"]
        kw = {}
        if "alpha" in obj:
            kw["alpha"] = float(obj["alpha"])
        if "m" in obj:
            kw["m"] = float(obj["m"])
        if "lambda" in obj:
            kw["lam"] = float(obj["lambda"])
        return cls(tag, **kw)


@dataclass(frozen=True)
class GraphPoint:
    x: SparseVec
    y: SparseVec


def eval_T(x: SparseVec) -> SparseVec:
    """T(x) = sum_n f_n(||x||) e_n; at most three nonzero coordinates."""
    t = norm(x)
    if t == 0.0:
        return ZERO
    out = {}
    for n in bumps.active_indices(t):
        v = bumps.f(n, t)
        if v != 0.0:
            out[n] = v
    return SparseVec._trusted(out, True)


def evaluate(spec: OperatorSpec, x: SparseVec) -> SparseVec:
    """Evaluate a single-valued catalog operator at ``x``."""
    tag = spec.tag
    if tag == "CounterT":
        return eval_T(x)
    if tag == "BAlpha":
        return axpy(spec.alpha, eval_T(x), x)
    if tag == "BScaled":
        m = spec.m
        return axpy(spec.alpha * m, eval_T(x / m), x)
    if tag == "LinearScalar":
        return spec.lam * x
    raise SetValuedError(
        f"{tag} is set-valued; only its resolvent is available (see resolvent.resolve)"
    )


eval = evaluate  # noqa: A001


def lipschitz_quotient(spec: OperatorSpec, x: SparseVec, y: SparseVec) -> float:
    d = norm(x - y)
    if d == 0.0:
        raise ValueError("Lipschitz quotient needs x != y")
    return norm(evaluate(spec, x) - evaluate(spec, y)) / d


def monotonicity_gap(spec: OperatorSpec, x: SparseVec, y: SparseVec) -> float:
    """<F(x) - F(y), x - y>; nonnegative exactly when the pair is monotone."""
    return inner(evaluate(spec, x) - evaluate(spec, y), x - y)


def saturating_pair() -> tuple[SparseVec, SparseVec]:
    """Radial pair inside (1/4, 1/2) where the three live bumps have slopes
    2, 0 and -1/2, so the quotient of T is exactly sqrt(17)/2."""
    return SparseVec({1: 5 / 16}), SparseVec({1: 7 / 16})


# -- random sampling ---------------------------------------------------------
# Batched so that 1e5-pair certification runs stay cheap.

def random_directions(rng: np.random.Generator, count: int, max_support: int = 8,
                      max_index: int = 16) -> list[SparseVec]:
    """``count`` unit vectors, each on 1..max_support random indices in 1..max_index."""
    sizes = rng.integers(1, max_support + 1, size=count)
    order = np.argsort(rng.random((count, max_index)), axis=1)[:, :max_support] + 1
    coef = rng.standard_normal((count, max_support))
    coef[np.arange(max_support)[None, :] >= sizes[:, None]] = 0.0
    nrm = np.linalg.norm(coef, axis=1)
    bad = nrm < 1e-8
    coef[bad, 0], nrm[bad] = 1.0, 1.0
    coef /= nrm[:, None]
    idx_rows, coef_rows = order.tolist(), coef.tolist()
    return [SparseVec(zip(idx_rows[j][:k], coef_rows[j][:k]))
            for j, k in enumerate(sizes.tolist())]


def random_direction(rng: np.random.Generator, max_support: int = 8, max_index: int = 16) -> SparseVec:
    return random_directions(rng, 1, max_support, max_index)[0]


def random_pairs(rng: np.random.Generator, count: int) -> list[tuple[SparseVec, SparseVec]]:
    """Independent pairs mixed with nearby and radial ones; norms are log-uniform.

    Radial pairs probe the directions where T's Lipschitz bound is tight.
    """
    kinds = rng.integers(3, size=count).tolist()
    r1 = (2.0 ** rng.uniform(-12.0, 2.0, size=count)).tolist()
    r2 = (2.0 ** rng.uniform(-12.0, 2.0, size=count)).tolist()
    rel = (2.0 ** rng.uniform(-10.0, 0.0, size=count)).tolist()
    fac = (2.0 ** rng.uniform(-2.0, 2.0, size=count)).tolist()
    d1 = random_directions(rng, count)
    d2 = random_directions(rng, count)
    pairs = []
    for j, kind in enumerate(kinds):
        x = r1[j] * d1[j]
        if kind == 0:
            y = r2[j] * d2[j]
        elif kind == 1:
            y = axpy(r1[j] * rel[j], d2[j], x)
        else:
            y = fac[j] * x
        if y == x:
            y = axpy(1e-3 * r1[j], d2[j], x)
        pairs.append((x, y))
    return pairs


def random_ball_points(rng: np.random.Generator, count: int, radius: float = 1.0) -> list[SparseVec]:
    """Vectors with norm in (0, radius]: half uniform radii, half log-uniform
    down to 2^-30 so many dyadic scales are visited."""
    uniform = radius * (1.0 - rng.random(count))
    logu = radius * 2.0 ** rng.uniform(-30.0, 0.0, size=count)
    r = np.where(rng.random(count) < 0.5, uniform, logu).tolist()
    return [rj * d for rj, d in zip(r, random_directions(rng, count))]
