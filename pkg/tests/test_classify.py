import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpstar import backends as bk
from cpstar import classify as cl
from cpstar import corpus
from cpstar import frobenius as fr
from cpstar import numeric as nm
from cpstar.backends import FHILB, REL, Obj
from cpstar.errors import NotAGroupoid

seeds = st.integers(0, 2**31 - 1)


def test_center_dimensions():
    for n in (1, 2, 3):
        assert cl.center(fr.pants(Obj(FHILB, n))).shape[1] == 1
    assert cl.center(corpus.c_plus_m2()).shape[1] == 2
    assert cl.center(corpus.diagonal(4)).shape[1] == 4


def test_wedderburn_examples():
    assert cl.wedderburn(fr.pants(Obj(FHILB, 3))).factor_dims == (3,)
    assert cl.wedderburn(fr.validate(corpus.c_plus_m2())).factor_dims == (1, 2)
    assert cl.wedderburn(fr.validate(corpus.diagonal(4))).factor_dims == (1, 1, 1, 1)


def test_normaliser_from_factors_examples():
    d2 = cl.wedderburn(fr.pants(Obj(FHILB, 2)))
    assert np.allclose(cl.normaliser_from_factors(d2).payload, np.eye(4) / np.sqrt(2))
    d12 = cl.wedderburn(fr.validate(corpus.c_plus_m2()))
    z = d12.iso.payload @ cl.normaliser_from_factors(d12).payload @ d12.basis
    assert np.allclose(z, np.diag([1] + [2 ** -0.5] * 4))
    d1 = cl.wedderburn(fr.pants(Obj(FHILB, 1)))
    assert np.allclose(cl.normaliser_from_factors(d1).payload, [[1]])


@given(seeds, st.sampled_from([(1, 2), (2,), (1, 1, 2), (3,), (1, 3), (2, 2)]))
def test_wedderburn_recovers_rotated_blocks(seed, dims):
    d = corpus.matrix_sum(list(dims), np.random.default_rng(seed))
    f = fr.validate(d)
    dec = cl.wedderburn(f, rng=np.random.default_rng(seed))
    assert dec.factor_dims == tuple(sorted(dims))
    assert cl.intertwines(f, dec)
    assert bk.equal(cl.normaliser_from_factors(dec), f.normaliser, nm.Tolerance.uniform(1e-8))


@given(seeds)
def test_star_is_blockwise_adjoint(seed):
    rng = np.random.default_rng(seed)
    f = fr.validate(corpus.matrix_sum([1, 2], rng))
    dec = cl.wedderburn(f, rng=rng)
    x = bk.point(FHILB, nm.random_complex(rng, f.dim))
    lhs = dec.to_blocks(fr.star(f, x))
    rhs = [b.conj().T for b in dec.to_blocks(x)]
    for u, v in zip(lhs, rhs):
        assert np.allclose(u, v, atol=1e-8)


def test_oracle_examples():
    c = fr.validate(corpus.c_plus_m2())
    dc = cl.wedderburn(c)
    assert cl.concrete_cp_oracle(bk.identity(c.carrier), dc, dc).ok
    p = fr.pants(Obj(FHILB, 2))
    dp = cl.wedderburn(p)
    v = cl.concrete_cp_oracle(corpus.transpose_map(2), dp, dp)
    assert not v.ok and v.min_eig == pytest.approx(-1.0)
    dd = cl.wedderburn(fr.validate(corpus.diagonal(2)))
    assert cl.concrete_cp_oracle(corpus.decoherence(2), dp, dd).ok


def test_groupoid_examples():
    z2 = cl.extract_groupoid(fr.validate(corpus.algebra_corpus()["z2_rel"]))
    assert z2.size == 2 and len(z2.objects) == 1
    assert list(z2.inverse) == [0, 1]
    ind = cl.extract_groupoid(fr.pants(Obj(REL, 2)))
    assert ind.size == 4 and len(ind.objects) == 2 and ind.is_indiscrete()
    u = cl.disjoint_union(cl.Groupoid.group(cl.cyclic_table(2)), cl.Groupoid.group([[0]]))
    assert u.size == 3 and len(u.objects) == 2


def test_from_table_rejects_non_groupoids():
    with pytest.raises(NotAGroupoid):
        cl.Groupoid.from_table([[0, 0], [0, 0]])


def test_respects_inverses_examples():
    g = cl.Groupoid.group(cl.cyclic_table(2))
    assert cl.relation_respects_inverses(bk.rel(list(itertools.product(range(2), repeat=2)), 2, 2), g, g)
    assert cl.relation_respects_inverses(bk.identity(Obj(REL, 2)), g, g)
    assert not cl.relation_respects_inverses(bk.rel([(1, 0)], 2, 2), g, g)
    # the functor Z2 -> trivial group
    t = cl.Groupoid.group([[0]])
    assert cl.relation_respects_inverses(bk.rel([(0, 0), (1, 0)], 2, 1), g, t)


@pytest.mark.parametrize("g", cl.groupoid_corpus(), ids=lambda g: g.name)
def test_groupoid_round_trip(g):
    d = cl.groupoid_to_algebra(g)
    f = fr.validate(d)
    assert f.report.ok and f.special
    assert bk.equal(f.normaliser, bk.identity(f.carrier))
    assert cl.groupoids_isomorphic(cl.extract_groupoid(f), g)


def test_groupoid_corpus_covers_small_sizes():
    sizes = sorted(g.size for g in cl.groupoid_corpus())
    assert min(sizes) == 1 and max(sizes) == 4
