import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpstar import backends as bk
from cpstar import corpus
from cpstar import cpm
from cpstar import cpstar as cs
from cpstar.backends import FHILB, REL, Obj
from cpstar.errors import CertificateFailure

seeds = st.integers(0, 2**31 - 1)
dims = st.integers(1, 3)


def test_check_cpm_examples():
    assert cpm.check_cpm(bk.identity(Obj(FHILB, 4)), 2, 2).ok
    assert not cpm.check_cpm(corpus.transpose_map(2), 2, 2).ok
    with pytest.raises(CertificateFailure):
        cpm.certify_cpm(corpus.transpose_map(2), 2, 2)
    # converse-diagonal relation {((i, i), (j, j))} is completely positive
    pairs = [(i * 2 + i, j * 2 + j) for i in range(2) for j in range(2)]
    x = Obj(REL, 2)
    assert cpm.check_cpm(bk.rel(pairs, 4, 4), x, x).ok


def test_phi_examples():
    one = cpm.phi(1, 1)
    assert bk.equal(one, bk.identity(Obj(FHILB, 1)))
    p = cpm.phi(2, 2)
    assert p.payload.shape == (16, 16)
    assert np.allclose(p.payload @ p.payload.T, np.eye(16))
    assert cpm.check_phi(2, 2).ok
    assert cpm.monoidal_structure_map(1, 2).reverify()


def test_phi_large_skips_certificate_but_checks_hom():
    r = cpm.check_phi(3, 3)
    assert r.unitary and r.star_homomorphism and r.ok


@pytest.mark.parametrize("be", [FHILB, REL])
def test_coherence(be):
    x, y, z = Obj(be, 2), Obj(be, 1), Obj(be, 2)
    assert all(cpm.coherence_checks(x, y, z).values())


def test_cpm_tensor_examples(rng):
    i2 = cpm.certify_cpm(bk.identity(Obj(FHILB, 4)), 2, 2)
    i3 = cpm.certify_cpm(bk.identity(Obj(FHILB, 9)), 3, 3)
    assert bk.equal(cpm.cpm_tensor(i2, i3).h, bk.identity(Obj(FHILB, 36)))
    h = cpm.certify_cpm(cs.random_cpm(2, 2, rng), 2, 2)
    s = cpm.certify_cpm(bk.fhilb([[0.5]]), 1, 1)
    assert bk.equal(cpm.cpm_tensor(s, h).h, bk.scale(h.h, 0.5))


@given(seeds)
def test_embedding_functorial(seed):
    rng = np.random.default_rng(seed)
    f = cpm.certify_cpm(cs.random_cpm(2, 3, rng), 2, 3)
    g = cpm.certify_cpm(cs.random_cpm(3, 1, rng), 3, 1)
    lg, lf = cpm.embed_morphism(g), cpm.embed_morphism(f)
    assert bk.equal(cpm.embed_morphism(cpm.compose_cpm(g, f)).f, (lg.f @ lf.f))
    assert cpm.embed_morphism(cpm.dagger_cpm(f)).reverify()
    # tensor through φ equals the CP* tensor conjugated by φ
    t = cpm.cpm_tensor(f, g)
    lhs = cpm.phi(3, 1) @ t.h
    rhs = bk.tensor(f.h, g.h) @ cpm.phi(2, 3)
    assert bk.distance(lhs, rhs) < 1e-9 * max(1, np.abs(t.h.payload).max())


@given(seeds, dims, dims)
def test_check_cpm_matches_cpstar_on_pants(seed, n, m):
    rng = np.random.default_rng(seed)
    a, b = cpm.embed_object(n), cpm.embed_object(m)
    for h in (cs.random_cpm(n, m, rng), bk.fhilb(rng.standard_normal((m * m, n * n)))):
        assert cpm.check_cpm(h, n, m).ok == cs.check_cpstar(h, a, b).ok


def test_fullness_fhilb_small():
    r = cpm.fullness_probe(2, 2, samples=100)
    assert r.ok and r.samples == 100


@pytest.mark.slow
def test_fullness_rel_exhaustive():
    r = cpm.fullness_probe(Obj(REL, 2), Obj(REL, 2))
    assert r.ok and r.exhaustive and r.samples == 2 ** 16


def test_essential_image():
    r = cpm.essential_image_test(corpus.c_plus_m2())
    assert not r.in_image and r.square_candidates == ()
    assert r.factor_dims == (1, 2)
    assert cpm.essential_image_test(corpus.pants_data(2)).in_image
    r = cpm.essential_image_test(corpus.diagonal(4))
    assert not r.in_image and r.square_candidates == (2,)
