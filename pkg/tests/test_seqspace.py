import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from protoderiv.seqspace import (SparseVec, ZERO, axpy, basis, inner, norm, norm_sq,
                                 parse_vec, scale)


def test_basis():
    assert basis(3, 0.25).entries == {3: 0.25}
    assert basis(1, 0) == ZERO
    assert basis(7, -0.5).entries == {7: -0.5}
    with pytest.raises(ValueError):
        basis(0, 1.0)


def test_constructor_canonicalizes():
    v = SparseVec({5: 1.0, 2: 0.0, 1: -3.0})
    assert list(v.entries.items()) == [(1, -3.0), (5, 1.0)]
    assert v == SparseVec({1: -3.0, 5: 1.0})
    with pytest.raises(ValueError):
        SparseVec({0: 1.0})
    with pytest.raises(ValueError):
        SparseVec({1: math.nan})


def test_norm_examples():
    assert norm(ZERO) == 0.0
    assert norm(SparseVec({1: 3, 2: 4})) == 5.0
    for n in (1, 5, 40, 600, 1000):
        v = SparseVec({n: 2.0 ** -n, n + 1: 2.0 ** (-n - 1)})
        # scaled by an exact power of two, so the rounding of sqrt(5)/2 carries over
        assert norm(v) == 2.0 ** -n * (math.sqrt(5) / 2)


def test_inner_examples():
    assert inner(basis(1), basis(2)) == 0.0
    assert inner(SparseVec({1: 2, 3: 1}), SparseVec({1: 0.5, 3: 2})) == 3.0
    v = SparseVec({1: 0.3, 4: -1.25, 9: 2.0})
    assert inner(v, v) == pytest.approx(norm(v) ** 2, rel=1e-15)


def test_axpy_examples():
    assert axpy(1, basis(1), basis(1, -1)) == ZERO
    assert axpy(2, basis(1), basis(2, 3)).entries == {1: 2.0, 2: 3.0}
    u, v = SparseVec({1: 1.5, 4: 2}), SparseVec({2: -1})
    assert axpy(0, u, v) == v


def test_iteration_order_and_json():
    v = axpy(1.0, SparseVec({10: 1.0, 3: 2.0}), SparseVec({7: 0.5}))
    assert v.support() == (3, 7, 10)
    assert v.to_json() == '{"3": 2.0, "7": 0.5, "10": 1.0}'
    assert SparseVec.from_json_obj(json.loads(v.to_json())) == v


def test_parse_vec():
    assert parse_vec("") == ZERO
    assert parse_vec("{}") == ZERO
    assert parse_vec("1:2,3:0.5") == SparseVec({1: 2.0, 3: 0.5})
    assert parse_vec('{"2": -1}') == basis(2, -1.0)
    with pytest.raises(ValueError):
        parse_vec("1")


def test_division_and_scaling():
    v = SparseVec({1: 3.0, 2: -1.0})
    assert (v / 2.0).entries == {1: 1.5, 2: -0.5}
    assert scale(0.0, v) == ZERO
    assert (-v).entries == {1: -3.0, 2: 1.0}


dyadic = st.integers(-2 ** 20, 2 ** 20).map(lambda k: k * 2.0 ** -10)
sparse_dyadic = st.dictionaries(st.integers(1, 40), dyadic, max_size=8).map(SparseVec)


@given(sparse_dyadic, sparse_dyadic)
def test_polarization_on_dyadic_inputs(u, v):
    lhs = norm_sq(u - v)
    rhs = norm_sq(u) - 2 * inner(u, v) + norm_sq(v)
    scale_ = max(norm_sq(u), norm_sq(v), 1e-300)
    assert abs(lhs - rhs) <= 8 * math.ulp(scale_)


@given(sparse_dyadic)
def test_canonical_form(v):
    assert all(c != 0.0 for c in v.entries.values())
    assert list(v.support()) == sorted(v.support())
    assert axpy(-1.0, v, v) == ZERO


def _random_sparse(rng):
    k = int(rng.integers(0, 9))
    idx = rng.choice(np.arange(1, 64), size=k, replace=False)
    return SparseVec({int(i): float(c) for i, c in zip(idx, rng.standard_normal(k) * 10.0 ** rng.uniform(-3, 3))})


def test_triangle_and_cauchy_schwarz_random():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        u, v = _random_sparse(rng), _random_sparse(rng)
        nu, nv = norm(u), norm(v)
        assert norm(u + v) <= (nu + nv) * (1 + 1e-12)
        assert abs(inner(u, v)) <= nu * nv * (1 + 1e-12)


@settings(max_examples=200)
@given(sparse_dyadic)
def test_norm_squared_matches_entry_sum(v):
    squares = [c * c for c in v.entries.values()]
    assert norm(v) ** 2 == pytest.approx(math.fsum(squares), rel=4 * 2.0 ** -52, abs=0)
