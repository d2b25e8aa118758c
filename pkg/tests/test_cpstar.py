
import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpstar import backends as bk
from cpstar import classify as cl
from cpstar import corpus
from cpstar import cpm
from cpstar import cpstar as cs
from cpstar import frobenius as fr
from cpstar.backends import FHILB
from cpstar.errors import CertificateFailure, NotNormalisable

seeds = st.integers(0, 2**31 - 1)
ALG = corpus.algebra_corpus()


def obj(name):
    return cs.as_object(fr.validate(ALG[name]))


FHILB_OBJS = ["pants1", "pants2", "diag2", "diag3", "c_plus_m2", "z3"]


def test_identity_is_cpstar():
    for name in ["pants2", "c_plus_m2", "z2_rel", "pants2_rel", "m2_weighted"]:
        a = obj(name)
        assert cs.check_cpstar(a.identity(), a, a).ok
        assert cs.check_cpstar_convolution(a.identity(), a, a).ok


def test_transpose_rejected():
    a = obj("pants2")
    t = corpus.transpose_map(2)
    v = cs.check_cpstar(t, a, a)
    assert not v.ok and v.min_eig < 0
    assert not cs.check_cpstar_convolution(t, a, a).ok
    assert not cs.check_star_homomorphism(t, a, a).ok


def test_rel_g_to_e_rejected():
    a = obj("z2_rel")
    v = cs.check_cpstar(bk.rel([(1, 0)], 2, 2), a, a)
    assert not v.ok and v.failing is not None


def test_lift_of_counit_on_diagonal():
    a = obj("diag2")
    h = cs.lift(a.algebra.counit, a, cs.trivial_object(FHILB))
    assert np.allclose(h.payload, [[1, 0, 0, 1]])


def test_positive_elements():
    p = obj("pants2")
    rho = bk.point(FHILB, np.diag([0.5, 0.5]).reshape(-1))
    assert cs.is_positive_element(rho, p).ok
    assert cs.is_normalised(rho, cs.trivial_object(FHILB), p)
    d = obj("diag2")
    assert not cs.is_positive_element(bk.point(FHILB, [1, -1]), d).ok
    with pytest.raises(CertificateFailure):
        cs.positive_element(bk.point(FHILB, [1, -1]), d)


def test_star_homomorphisms():
    a = obj("pants2")
    assert cs.check_star_homomorphism(a.identity(), a, a).ok
    assert cpm.check_phi(2, 2).ok


def test_non_normalisable_object_rejected():
    d = ALG["pants2"]
    f = fr.validate(d)
    bare = fr.FrobeniusAlgebra(f.data, f.report, f.symmetric, f.special, f.commutative, None)
    with pytest.raises(NotNormalisable):
        cs.CPStarObject(bare)


@given(seeds, st.sampled_from(FHILB_OBJS), st.sampled_from(FHILB_OBJS), st.booleans())
def test_checkers_agree(seed, na, nb, constructed):
    rng = np.random.default_rng(seed)
    a, b = obj(na), obj(nb)
    f = cs.random_cpstar(a, b, rng) if constructed else cs.random_hermitian_preserving(a, b, rng)
    r = cs.check_cpstar(f, a, b)
    c = cs.check_cpstar_convolution(f, a, b)
    o = cl.concrete_cp_oracle(f, cl.wedderburn(a.algebra), cl.wedderburn(b.algebra))
    assert r.ok == c.ok == o.ok
    if constructed:
        assert r.ok


@given(seeds)
def test_closure_under_operations(seed):
    rng = np.random.default_rng(seed)
    a, b, c = obj("pants2"), obj("c_plus_m2"), obj("diag2")
    f = cs.certify(cs.random_cpstar(a, b, rng), a, b)
    g = cs.certify(cs.random_cpstar(b, c, rng), b, c)
    assert cs.compose_cp(g, f).reverify()
    assert cs.dagger_cp(f).reverify()
    h = cs.certify(cs.random_cpstar(c, c, rng), c, c)
    assert cs.tensor_cp(f, h).reverify()


def test_swap_and_cap_certified():
    a, b = obj("pants2"), obj("diag2")
    assert cs.swap_cp(a, b).reverify()
    assert cs.cap_cp(b).reverify()


@pytest.mark.parametrize("name", ["transpose2", "identity2", "depolarizing2", "decoherence2",
                                  "noisy2", "trace2", "prepare2", "stochastic2"])
def test_star_homomorphisms_are_cpstar(name):
    f, s, t = corpus.morphism_corpus()[name]
    a, b = obj(s), obj(t)
    if cs.check_star_homomorphism(f, a, b).ok:
        assert cs.check_cpstar(f, a, b).ok


def test_pos_elems_finds_cup_state_for_transpose():
    a = obj("pants2")
    r = cs.pos_elems_equivalence_probe(corpus.transpose_map(2), a, a, max_dim=2)
    assert not r.criterion_a and not r.criterion_c and r.complete
    n, rho, eig = r.counterexample
    assert n == 2 and eig < 0


@given(seeds, st.sampled_from(["pants2", "c_plus_m2", "diag2"]))
def test_pos_elems_agree(seed, name):
    rng = np.random.default_rng(seed)
    a = obj(name)
    f = cs.random_cpstar(a, a, rng) if seed % 2 else cs.random_hermitian_preserving(a, a, rng)
    r = cs.pos_elems_equivalence_probe(f, a, a, max_dim=2, samples=1, rng=rng)
    assert r.complete and r.agree


def test_pos_elems_rel_exhaustive():
    a = obj("z2_rel")
    for f in corpus.all_relations(2, 2):
        r = cs.pos_elems_equivalence_probe(f, a, a, max_dim=2)
        assert r.complete and r.agree
