import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpstar import backends as bk
from cpstar import corpus
from cpstar import frobenius as fr
from cpstar import numeric as nm
from cpstar.backends import FHILB, REL, Obj
from cpstar.errors import NotNormalisable, NotValidated

seeds = st.integers(0, 2**31 - 1)
CORPUS = corpus.algebra_corpus()
NAMES = sorted(CORPUS)


def pants(n, be=FHILB):
    return fr.pants(Obj(be, n))


def test_axiom_examples():
    assert fr.check_frobenius(pants(2).data).ok
    assert fr.check_frobenius(corpus.diagonal(2)).ok
    d = fr.AlgebraData(Obj(FHILB, 2), bk.fhilb(np.zeros((2, 4))), bk.point(FHILB, [1, 1]))
    r = fr.check_frobenius(d)
    assert not r.unitality
    with pytest.raises(NotValidated):
        fr.validate(d)


def test_property_flags():
    z2 = fr.validate(CORPUS["z2_rel"])
    assert z2.special and z2.symmetric and z2.commutative
    p = pants(2)
    assert p.symmetric and not p.special and not p.commutative
    assert bk.equal(p.mult @ p.comult, bk.scale(p.identity(), 2))
    for n in (2, 3, 4):
        d = fr.validate(corpus.diagonal(n))
        assert d.commutative and d.special


def test_loop_functional_examples():
    assert np.allclose(fr.loop_functional(pants(2)).payload, [[2, 0, 0, 2]])
    assert np.allclose(fr.loop_functional(corpus.diagonal(3)).payload, [[1, 1, 1]])
    # both elements of Z2 are self-inverse, so the relational trace holds at e only
    loop = fr.loop_functional(CORPUS["z2_rel"])
    assert loop.payload.sorted_pairs() == [(0, 0)]


def test_normaliser_examples():
    for n in (1, 2, 3):
        z = fr.solve_normaliser(pants(n).data)
        assert bk.equal(z, bk.scale(bk.identity(Obj(FHILB, n * n)), n ** -0.5))
    z = fr.solve_normaliser(corpus.c_plus_m2())
    assert np.allclose(z.payload, np.diag([1] + [2 ** -0.5] * 4))
    z = fr.solve_normaliser(CORPUS["z3_rel"])
    assert bk.equal(z, bk.identity(Obj(REL, 3)))


def test_pants_scalar_identity():
    """z² · dim X = 1 for the pants normaliser."""
    for n in (1, 2, 3):
        z = pants(n).normaliser.payload[0, 0]
        assert abs(z * z * n - 1) < 1e-12


def test_pants_small_cases():
    one = pants(1)
    assert one.dim == 1 and bk.equal(one.mult, bk.identity(Obj(FHILB, 1)))
    rel2 = fr.validate(pants(2, REL).data)
    assert rel2.special and rel2.dim == 4


def test_product_and_dual():
    d22 = fr.product_algebra(fr.validate(corpus.diagonal(2)), fr.validate(corpus.diagonal(2)))
    d4 = corpus.diagonal(4)
    assert bk.equal(d22.mult, d4.mult) and bk.equal(d22.unit, d4.unit)
    p = fr.product_algebra(pants(2), pants(3))
    assert p.report.ok and p.symmetric
    assert bk.equal(p.normaliser, bk.scale(bk.identity(Obj(FHILB, 36)), 6 ** -0.5))
    z2 = fr.validate(CORPUS["z2_rel"])
    dual = fr.dual_algebra(z2)
    assert bk.equal(dual.mult, z2.mult)


def test_action_examples():
    act = fr.action(corpus.diagonal(2)).payload
    expected = np.zeros((4, 2))
    expected[0, 0] = expected[3, 1] = 1
    assert np.allclose(act, expected)
    assert bk.equal(fr.coaction(pants(2)), bk.dagger(fr.action(pants(2))))
    # Rel Z2: g ↦ {(h, h·g)}
    pairs = fr.action(CORPUS["z2_rel"]).payload.sorted_pairs()
    assert pairs == [(0, 0), (0, 3), (1, 1), (1, 2)]


def test_star_on_pants_is_adjoint(rng):
    p = pants(2)
    m = nm.random_complex(rng, (2, 2))
    x = bk.point(FHILB, m.reshape(-1))
    assert np.allclose(fr.star(p, x).payload.reshape(2, 2), m.conj().T)
    assert bk.equal(fr.star(p, p.unit), p.unit)


@pytest.mark.parametrize("name", NAMES)
def test_corpus_invariants(name):
    f = fr.validate(CORPUS[name])
    assert f.report.ok
    if f.normalisable:
        assert fr.check_symmetric(f)
        assert fr.check_norm_alt(f, f.normaliser)
    if f.symmetric:
        assert fr.check_frob_actions(f)


@given(seeds, st.sampled_from(["c_plus_m2", "pants2", "z3", "m2_weighted"]))
def test_star_involutive_antimultiplicative(seed, name):
    f = fr.validate(CORPUS[name])
    rng = np.random.default_rng(seed)
    x = bk.point(FHILB, nm.random_complex(rng, f.dim))
    y = bk.point(FHILB, nm.random_complex(rng, f.dim))
    assert bk.equal(fr.star(f, fr.star(f, x)), x, nm.Tolerance.uniform(1e-8))
    lhs = fr.star(f, fr.multiply(f, x, y))
    rhs = fr.multiply(f, fr.star(f, y), fr.star(f, x))
    assert bk.distance(lhs, rhs) < 1e-8 * max(1, nm.sup_norm(lhs.payload))


@pytest.mark.parametrize("name", ["diag2", "diag3", "diag4", "z2", "z3", "z2xz2"])
def test_copyable_points_orthogonal(name):
    f = fr.validate(CORPUS[name])
    pts = fr.copyable_points(f)
    assert len(pts) == f.dim
    g = np.array([p.payload.ravel() for p in pts])
    gram = g.conj() @ g.T
    assert np.allclose(gram - np.diag(np.diag(gram)), 0, atol=1e-9)
    for p in pts:
        assert bk.equal(f.comult @ p, bk.tensor(p, p))


def test_copyable_points_rel():
    pts = fr.copyable_points(fr.validate(CORPUS["diag2_rel"]))
    assert sorted(tuple(p.payload.sorted_pairs()) for p in pts) == [((0, 0),), ((0, 1),)]


def test_randomised_axiom_path():
    f = fr.pants(Obj(FHILB, 6))
    assert f.report.method == "randomized" and f.report.ok


def test_broken_algebra_has_no_normaliser():
    # doubling the multiplication breaks unitality
    d = CORPUS["z2"]
    bad = fr.AlgebraData(d.carrier, bk.scale(d.mult, 2), d.unit)
    with pytest.raises((NotNormalisable, NotValidated)):
        fr.solve_normaliser(bad)
