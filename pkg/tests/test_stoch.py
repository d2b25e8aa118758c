import numpy as np
import pytest
from hypothesis import given, strategies as st

from cpstar import backends as bk
from cpstar import corpus
from cpstar import cpstar as cs
from cpstar import frobenius as fr
from cpstar import stoch
from cpstar.backends import FHILB, Obj
from cpstar.errors import NotCommutative, NotStochastic

seeds = st.integers(0, 2**31 - 1)


def diag(n):
    return fr.validate(corpus.diagonal(n))


def ket(v):
    v = np.asarray(v, dtype=complex)
    return bk.point(FHILB, np.outer(v, v.conj()).reshape(-1))


def test_identity_matrix():
    d = diag(2)
    assert np.allclose(stoch.to_stochastic_matrix(d.identity(), d, d), np.eye(2))


def test_function_gives_zero_one_columns():
    s = np.array([[0, 1, 1], [1, 0, 0]], dtype=float)
    f = stoch.from_stochastic_matrix(s, diag(3), diag(2))
    assert np.allclose(stoch.to_stochastic_matrix(f.f, diag(3), diag(2)), s)


def test_rejects_non_stochastic():
    with pytest.raises(NotStochastic):
        stoch.check_stochastic(np.array([[0.5, 0.2], [0.6, 0.8]]))
    with pytest.raises(NotStochastic):
        stoch.check_stochastic(np.array([[1.5, 0.0], [-0.5, 1.0]]))


def test_noncommutative_rejected():
    with pytest.raises(NotCommutative):
        stoch.stoch_object(fr.pants(Obj(FHILB, 2)))


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_round_trip(seed, n, m):
    s = corpus.random_stochastic(np.random.default_rng(seed), m, n)
    f = stoch.from_stochastic_matrix(s, diag(n) if n > 1 else fr.pants(Obj(FHILB, 1)),
                                     diag(m) if m > 1 else fr.pants(Obj(FHILB, 1)))
    back = stoch.to_stochastic_matrix(f.f, f.source, f.target)
    assert np.abs(back - s).max() <= 1e-9


def test_round_trip_on_group_algebra(rng):
    """Copyable points of Z3 are the characters, not basis vectors."""
    z3 = fr.validate(corpus.cyclic(3))
    s = corpus.random_stochastic(rng, 3, 3)
    f = stoch.from_stochastic_matrix(s, z3, z3)
    assert np.allclose(stoch.to_stochastic_matrix(f.f, z3, z3), s)


def test_povm_examples():
    p2 = corpus.decoherence(2)
    povm = stoch.extract_povm(p2, 2, diag(2))
    assert np.allclose(povm.operators()[0], np.diag([1, 0]))
    assert np.allclose(povm.operators()[1], np.diag([0, 1]))
    tr = stoch.extract_povm(corpus.trace_map(2), 2, fr.pants(Obj(FHILB, 1)))
    assert len(tr.elements) == 1 and np.allclose(tr.operators()[0], np.eye(2))
    noisy = stoch.extract_povm(corpus.noisy_measurement(0.8), 2, diag(2))
    assert np.allclose(noisy.operators()[0], 0.8 * np.diag([1, 0]) + 0.1 * np.eye(2))
    assert noisy.completeness_defect() <= 1e-12


def test_born_examples():
    d = diag(2)
    proj = corpus.decoherence(2)
    assert np.allclose(stoch.born(proj, ket([1, 0]), 2, d).as_array(), [1, 0])
    mixed = bk.point(FHILB, (np.eye(2) / 2).reshape(-1))
    assert np.allclose(stoch.born(proj, mixed, 2, d).as_array(), [0.5, 0.5])
    noisy = corpus.noisy_measurement(0.8)
    plus = ket(np.array([1, 1]) / np.sqrt(2))
    w = stoch.born(noisy, plus, 2, d).as_array()
    ops = stoch.extract_povm(noisy, 2, d).operators()
    r = plus.payload.reshape(2, 2)
    assert np.allclose(w, [np.trace(e @ r).real for e in ops])


def test_prepare_examples():
    d = diag(2)
    e = corpus.basis_preparation(2)
    p = stoch.prepare(e, stoch.Distribution((1.0, 0.0)), d, 2)
    assert np.allclose(p.point.payload.reshape(2, 2), np.diag([1, 0]))
    p = stoch.prepare(e, stoch.Distribution((0.5, 0.5)), d, 2)
    assert np.allclose(p.point.payload.reshape(2, 2), np.eye(2) / 2)
    p = stoch.prepare(e, stoch.Distribution((0.3, 0.7)), d, 2)
    assert np.allclose(p.point.payload.reshape(2, 2), np.diag([0.3, 0.7]))


@given(seeds, st.integers(2, 3), st.integers(2, 4))
def test_born_is_a_distribution(seed, n, k):
    rng = np.random.default_rng(seed)
    s = corpus.random_stochastic(rng, k, n)
    meas = stoch.from_stochastic_matrix(s, diag(n), diag(k)).f @ corpus.decoherence(n)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    rho /= np.trace(rho)
    w = stoch.born(meas, bk.point(FHILB, rho.reshape(-1)), n, diag(k)).as_array()
    assert (w >= -1e-12).all() and abs(w.sum() - 1) <= 1e-9


def test_measure_then_prepare_is_cpstar():
    a = cs.as_object(fr.pants(Obj(FHILB, 2)))
    ep = corpus.basis_preparation(2) @ corpus.noisy_measurement(0.8)
    assert cs.check_cpstar(ep, a, a).ok
