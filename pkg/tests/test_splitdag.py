import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpstar import backends as bk
from cpstar import corpus
from cpstar import cpstar as cs
from cpstar import frobenius as fr
from cpstar import splitdag as sd
from cpstar.backends import FHILB, Obj
from cpstar.errors import MembershipFailure, NoSquareRoot

seeds = st.integers(0, 2**31 - 1)
ALG = corpus.algebra_corpus()


def obj(name):
    return cs.as_object(fr.validate(ALG[name]))


def test_central_sqrt_examples():
    p = fr.pants(Obj(FHILB, 2))
    g = sd.central_sqrt(p, bk.scale(p.identity(), 0.5))
    assert bk.equal(g, bk.scale(p.identity(), 2 ** -0.5))
    c = fr.validate(ALG["c_plus_m2"])
    root = sd.central_sqrt(c, bk.fhilb(np.diag([1] + [0.5] * 4)))
    assert np.allclose(root.payload, np.diag([1] + [2 ** -0.5] * 4))
    z2 = fr.validate(ALG["z2_rel"])
    assert bk.equal(sd.central_sqrt(z2, z2.identity()), z2.identity())


def test_central_sqrt_rejects_negative():
    p = fr.pants(Obj(FHILB, 2))
    with pytest.raises(NoSquareRoot):
        sd.central_sqrt(p, bk.scale(p.identity(), -1))


@pytest.mark.parametrize("name", sorted(ALG))
def test_F_object_on_corpus(name):
    a = obj(name)
    p = sd.functor_F_object(a)
    assert sd.is_dagger_idempotent(p.p)
    assert p.certificate.ok
    assert p.rank == a.dim
    assert sd.certify_normaliser(a).ok


def test_F_object_special_case():
    a = obj("diag3")
    assert a.algebra.special
    p = sd.functor_F_object(a).p
    assert bk.equal(p, fr.action(a.algebra) @ fr.coaction(a.algebra))
    assert sd.functor_F_object(obj("pants2")).p.payload.shape == (16, 16)


def test_F_morphism_identity_and_composition(rng):
    a, b = obj("c_plus_m2"), obj("pants2")
    fid = sd.functor_F_morphism(cs.identity_cp(a))
    assert bk.equal(fid.f, sd.functor_F_object(a).p)
    f = cs.certify(cs.random_cpstar(a, b, rng), a, b)
    g = cs.certify(cs.random_cpstar(b, a, rng), b, a)
    lhs = sd.functor_F_morphism(cs.compose_cp(g, f)).f
    rhs = sd.compose_split(sd.functor_F_morphism(g), sd.functor_F_morphism(f)).f
    assert bk.distance(lhs, rhs) < 1e-8 * max(1, np.abs(lhs.payload).max())


def test_membership(rng):
    a = obj("c_plus_m2")
    p = sd.functor_F_object(a)
    h = cs.random_cpm(5, 5, rng)
    assert sd.split_membership(p.p @ h @ p.p, p, p)
    with pytest.raises(MembershipFailure):
        sd.make_split(h, p, p)


@given(seeds, st.sampled_from(["pants2", "c_plus_m2", "diag2", "m2_weighted"]),
       st.sampled_from(["pants1", "diag3", "c_plus_m2"]), st.booleans())
def test_cpstar_iff_split(seed, na, nb, constructed):
    rng = np.random.default_rng(seed)
    a, b = obj(na), obj(nb)
    f = cs.random_cpstar(a, b, rng) if constructed else cs.random_hermitian_preserving(a, b, rng)
    left, right = sd.cpstar_vs_split(f, a, b)
    assert left == right


def test_cpstar_iff_split_rel_exhaustive():
    a = obj("z2_rel")
    for f in corpus.all_relations(2, 2):
        left, right = sd.cpstar_vs_split(f, a, a)
        assert left == right


def test_FL_probe():
    for n in (1, 2, 3):
        r = sd.FL_vs_inclusion_probe(n, samples=5)
        assert r.ok
    scalar = sd.FL_vs_inclusion_probe(1, samples=3)
    assert scalar.max_naturality_error == 0.0
    assert sd.FL_vs_inclusion_probe(2, 3, samples=5).ok
