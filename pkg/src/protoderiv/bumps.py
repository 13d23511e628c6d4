"""The dyadic bump functions f_n and their one-sided derivatives.

f_n vanishes outside (2^-n-1, 2^-n+2), ramps up with slope 2 to the
plateau value 2^-n on [2^-n, 2^-n+1] and ramps back down with slope -1/2.
All breakpoints are powers of two and both ramps are evaluated by
Sterbenz-exact subtractions, so every value is computed without rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

# beyond this, 2^-n-1 leaves the normal double range
MAX_INDEX = 1070

BRANCH_KINDS = ("zero-left", "ramp-up", "plateau", "ramp-down", "zero-right")
SLOPES = {"zero-left": 0.0, "ramp-up": 2.0, "plateau": 0.0, "ramp-down": -0.5, "zero-right": 0.0}


class BumpRangeError(ValueError):
    """Requested bump index lies outside the supported dyadic range."""


def _check_index(n: int) -> None:
    if n < 1:
        raise ValueError(f"bump index must be >= 1, got {n}")
    if n > MAX_INDEX:
        raise BumpRangeError(f"bump index {n} exceeds the double-precision cap {MAX_INDEX}")


def breakpoints(n: int) -> tuple[float, float, float, float]:
    """Return ``(2^-n-1, 2^-n, 2^-n+1, 2^-n+2)``."""
    _check_index(n)
    return tuple(math.ldexp(1.0, -n + j) for j in (-1, 0, 1, 2))


@dataclass(frozen=True)
class BumpBranch:
    kind: str
    n: int
    breakpoints: tuple[float, float, float, float]

    @property
    def slope(self) -> float:
        return SLOPES[self.kind]

    def value(self, t: float) -> float:
        a, b, c, d = self.breakpoints
        if self.kind == "ramp-up":
            return 2.0 * (t - a)
        if self.kind == "plateau":
            return b
        if self.kind == "ramp-down":
            return 0.5 * (d - t)
        return 0.0


def branch(n: int, t: float) -> BumpBranch:
    """Select the branch of f_n used at ``t``.

    Shared endpoints go to the lower branch; the adjacent formulas agree
    there by continuity.
    """
    if t < 0:
        raise ValueError(f"f_n is defined on [0, inf), got t={t}")
    bps = breakpoints(n)
    a, b, c, d = bps
    if t <= a:
        kind = "zero-left"
    elif t <= b:
        kind = "ramp-up"
    elif t <= c:
        kind = "plateau"
    elif t <= d:
        kind = "ramp-down"
    else:
        kind = "zero-right"
    return BumpBranch(kind, n, bps)


def f(n: int, t: float) -> float:
    """Evaluate f_n(t) exactly."""
    if t < 0:
        raise ValueError(f"f_n is defined on [0, inf), got t={t}")
    _check_index(n)
    a = math.ldexp(1.0, -n - 1)
    if t <= a:
        return 0.0
    b = a + a
    if t <= b:
        return 2.0 * (t - a)
    c = b + b
    if t <= c:
        return b
    d = c + c
    if t <= d:
        return 0.5 * (d - t)
    return 0.0


def f_dd(n: int, t: float, direction: int) -> float:
    """One-sided derivative lim_{s->0+} (f_n(t + s*direction) - f_n(t)) / s."""
    if t <= 0:
        raise ValueError(f"one-sided derivative needs t > 0, got {t}")
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    a, b, c, d = breakpoints(n)
    if direction == 1:
        # branch on [t, t + s)
        if a <= t < b:
            slope = 2.0
        elif c <= t < d:
            slope = -0.5
        else:
            slope = 0.0
    else:
        # branch on (t - s, t]
        if a < t <= b:
            slope = 2.0
        elif c < t <= d:
            slope = -0.5
        else:
            slope = 0.0
    return slope * direction


def active_indices(t: float) -> list[int]:
    """Indices n >= 1 with f_n(t) != 0, i.e. 2^-n-1 < t < 2^-n+2.

    Read off the binary exponent of ``t``; never more than three indices.
    """
    if t <= 0:
        raise ValueError(f"active window needs t > 0, got {t}")
    mant, e = math.frexp(t)
    if mant == 0.5:
        # t = 2^(e-1) sits on a breakpoint of every window it touches
        lo, hi = 1 - e, 2 - e
    else:
        lo, hi = -e, 2 - e
    idx = [n for n in range(max(lo, 1), hi + 1)]
    if idx and idx[-1] > MAX_INDEX:
        raise BumpRangeError(f"t={t!r} activates bump indices beyond {MAX_INDEX}")
    return idx


def envelope(t: float) -> float:
    """max_n f_n(t), the quantity behind the lower bound f_n(t) >= t/2."""
    if t <= 0:
        return 0.0
    return max((f(n, t) for n in active_indices(t)), default=0.0)
