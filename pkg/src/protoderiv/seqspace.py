"""Sparse model of l2: finitely supported sequences indexed from 1.

Vectors are immutable.  Indices are unbounded positive integers, so the
active coordinates of scaled operators can drift to arbitrarily large
indices without any truncation dimension.
"""
from __future__ import annotations

import json
import math
from collections.abc import Iterable, Iterator, Mapping
from types import MappingProxyType


class SparseVec:
    """Finitely supported element of l2 in canonical form.

    No stored coefficient is zero and entries are kept in ascending index
    order, so two vectors are equal iff their entry maps are equal.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, float] | Iterable[tuple[int, float]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        clean: dict[int, float] = {}
        for idx, coef in items:
            if isinstance(idx, bool) or int(idx) != idx:
                raise TypeError(f"index must be an integer, got {idx!r}")
            idx = int(idx)
            if idx < 1:
                raise ValueError(f"indices start at 1, got {idx}")
            coef = float(coef)
            if not math.isfinite(coef):
                raise ValueError(f"coefficient at index {idx} is not finite: {coef}")
            if coef != 0.0:
                clean[idx] = coef
        self._entries = MappingProxyType(dict(sorted(clean.items())))

    @classmethod
    def _trusted(cls, entries: dict[int, float], ordered: bool = False) -> SparseVec:
        # entries must already be canonical (no zeros, indices >= 1)
        v = object.__new__(cls)
        v._entries = MappingProxyType(entries if ordered else dict(sorted(entries.items())))
        return v

    @property
    def entries(self) -> Mapping[int, float]:
        return self._entries

    def support(self) -> tuple[int, ...]:
        return tuple(self._entries)

    def items(self):
        return self._entries.items()

    def __getitem__(self, idx: int) -> float:
        return self._entries.get(idx, 0.0)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseVec):
            return NotImplemented
        return dict(self._entries) == dict(other._entries)

    def __hash__(self) -> int:
        return hash(tuple(self._entries.items()))

    def __repr__(self) -> str:
        return f"SparseVec({dict(self._entries)!r})"

    def __add__(self, other: SparseVec) -> SparseVec:
        return axpy(1.0, other, self)

    def __sub__(self, other: SparseVec) -> SparseVec:
        return axpy(-1.0, other, self)

    def __neg__(self) -> SparseVec:
        return SparseVec._trusted({i: -c for i, c in self._entries.items()}, True)

    def __mul__(self, a: float) -> SparseVec:
        return scale(a, self)

    __rmul__ = __mul__

    def __truediv__(self, a: float) -> SparseVec:
        """Divide every coefficient by ``a`` (one rounding per entry)."""
        a = float(a)
        if a == 0.0:
            raise ZeroDivisionError("division of SparseVec by zero")
        return SparseVec._trusted(
            {i: q for i, c in self._entries.items() if (q := c / a) != 0.0}, True
        )

    def to_json_obj(self) -> dict[str, float]:
        return {str(i): c for i, c in self._entries.items()}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: Mapping[str, float]) -> SparseVec:
        return cls({int(k): v for k, v in obj.items()})


ZERO = SparseVec()


def basis(n: int, c: float = 1.0) -> SparseVec:
    """Return ``c * e_n``; the empty vector when ``c == 0``."""
    if n < 1:
        raise ValueError(f"basis index must be >= 1, got {n}")
    return SparseVec({n: c})


def norm_sq(v: SparseVec) -> float:
    return math.fsum(c * c for c in v._entries.values())


_SQ_SAFE_LO, _SQ_SAFE_HI = 2.0 ** -480, 2.0 ** 480


def norm(v: SparseVec) -> float:
    vals = v._entries.values()
    if not vals:
        return 0.0
    big = max(map(abs, vals))
    if _SQ_SAFE_LO < big < _SQ_SAFE_HI:
        return math.sqrt(math.fsum(c * c for c in vals))
    # rescale by a power of two (exact) so deep-index coefficients do not
    # underflow when squared
    e = math.frexp(big)[1]
    return math.ldexp(math.sqrt(math.fsum(math.ldexp(c, -e) ** 2 for c in vals)), e)


def inner(u: SparseVec, v: SparseVec) -> float:
    if len(u) > len(v):
        u, v = v, u
    ve = v._entries
    return math.fsum(c * ve[i] for i, c in u._entries.items() if i in ve)


def scale(a: float, v: SparseVec) -> SparseVec:
    a = float(a)
    return SparseVec._trusted(
        {i: p for i, c in v._entries.items() if (p := a * c) != 0.0}, True
    )


def axpy(a: float, u: SparseVec, v: SparseVec) -> SparseVec:
    """Return ``a*u + v``; exact cancellations drop out of the support."""
    a = float(a)
    out = dict(v._entries)
    ordered = True
    if a != 0.0:
        for i, c in u._entries.items():
            if i in out:
                s = a * c + out[i]
                if s == 0.0:
                    del out[i]
                else:
                    out[i] = s
            else:
                s = a * c
                if s != 0.0:
                    out[i] = s
                    ordered = False
    return SparseVec._trusted(out, ordered)


def dist(u: SparseVec, v: SparseVec) -> float:
    return norm(u - v)


def parse_vec(text: str) -> SparseVec:
    """Parse ``'{"1": 2.0}'`` (JSON) or ``'1:2,3:0.5'`` into a vector.

    An empty string, ``'0'`` or ``'{}'`` is the zero vector.
    """
    text = text.strip()
    if text in ("", "0", "{}"):
        return ZERO
    if text.startswith("{"):
        return SparseVec.from_json_obj(json.loads(text))
    entries = {}
    for part in text.split(","):
        idx, _, coef = part.partition(":")
        if not coef:
            raise ValueError(f"expected 'index:coefficient', got {part!r}")
        entries[int(idx)] = float(coef)
    return SparseVec(entries)
