import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpstar import backends as bk
from cpstar import numeric as nm
from cpstar.backends import FHILB, REL, Obj
from cpstar.errors import BackendMismatch, ShapeMismatch

seeds = st.integers(0, 2**31 - 1)
backends = st.sampled_from([FHILB, REL])


def rand_morphism(rng, be, n, m):
    if be is FHILB:
        return bk.fhilb(nm.random_complex(rng, (m, n)))
    return bk.rel_from_bool(rng.random((m, n)) < 0.5)


def test_rel_compose_example():
    g = bk.rel([(0, 1)], 2, 2)
    f = bk.rel([(1, 0)], 2, 2)
    # (1,0) then (0,1): 1 -> 0 -> 1
    assert bk.compose(g, f).payload.sorted_pairs() == [(1, 1)]


def test_rel_scalars():
    one = bk.unit_object(REL)
    for n in (1, 2, 3):
        a = Obj(REL, n)
        assert bk.equal(bk.cap(a) @ bk.swap(a, a) @ bk.cup(a), bk.identity(one))
    assert bk.is_zero(bk.zero(one, one))


def test_mismatches():
    with pytest.raises(BackendMismatch):
        bk.compose(bk.identity(Obj(FHILB, 2)), bk.identity(Obj(REL, 2)))
    with pytest.raises(ShapeMismatch):
        bk.compose(bk.identity(Obj(FHILB, 2)), bk.identity(Obj(FHILB, 3)))


@given(backends, st.integers(1, 4))
def test_snake_equations(be, n):
    a = Obj(be, n)
    one = bk.identity(a)
    # (cap ⊗ 1)(1 ⊗ cup) with A* = A as index sets
    left = bk.tensor(bk.cap(a), one) @ bk.tensor(one, bk.cup(a))
    right = bk.tensor(one, bk.cap(a)) @ bk.tensor(bk.cup(a), one)
    assert bk.equal(left, one) and bk.equal(right, one)


@given(backends, seeds, st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
def test_bifunctoriality_and_dagger(be, seed, n, m, p, q):
    rng = np.random.default_rng(seed)
    f1, g1 = rand_morphism(rng, be, n, m), rand_morphism(rng, be, m, p)
    f2, g2 = rand_morphism(rng, be, q, n), rand_morphism(rng, be, n, q)
    lhs = bk.tensor(g1 @ f1, g2 @ f2)
    rhs = bk.tensor(g1, g2) @ bk.tensor(f1, f2)
    assert bk.equal(lhs, rhs)
    assert bk.equal(bk.dagger(bk.dagger(f1)), f1)
    assert bk.equal(bk.dagger(g1 @ f1), bk.dagger(f1) @ bk.dagger(g1))
    assert bk.equal(bk.dagger(bk.tensor(f1, f2)), bk.tensor(bk.dagger(f1), bk.dagger(f2)))


@given(backends, seeds, st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
def test_swap_naturality(be, seed, n, m, p, q):
    rng = np.random.default_rng(seed)
    f, g = rand_morphism(rng, be, n, m), rand_morphism(rng, be, p, q)
    lhs = bk.swap(Obj(be, m), Obj(be, q)) @ bk.tensor(f, g)
    rhs = bk.tensor(g, f) @ bk.swap(Obj(be, n), Obj(be, p))
    assert bk.equal(lhs, rhs)


def test_exhaustive_rel_dagger_involution():
    for n, m in itertools.product((1, 2), repeat=2):
        cells = n * m
        for mask in range(1 << cells):
            r = bk.rel_from_bool(np.array([(mask >> i) & 1 for i in range(cells)],
                                          dtype=bool).reshape(m, n))
            assert bk.equal(bk.dagger(bk.dagger(r)), r)
            assert bk.equal(bk.conjugate(r), r)


def test_permute_matches_swap():
    for be in (FHILB, REL):
        a, b = Obj(be, 2), Obj(be, 3)
        assert bk.equal(bk.permute(be, [2, 3], [1, 0]), bk.swap(a, b))


def test_kraus_superop_is_lift_of_identity():
    g = bk.identity(Obj(FHILB, 2))
    h = bk.superop_from_kraus(g, 1, 2)
    assert bk.equal(h, bk.identity(Obj(FHILB, 4)))
