"""Named algebras and morphisms used by the tests, the CLI and the self-test."""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from . import backends as bk
from . import classify as cl
from . import frobenius as fr
from .backends import FHILB, REL, Morphism, Obj


# -- algebras ----------------------------------------------------------------------------

def diagonal(n: int, backend=FHILB) -> fr.AlgebraData:
    """Pointwise multiplication on ``n`` basis points, unit ``Σ e_i``."""
    be = bk.Backend(backend)
    m = np.zeros((n, n * n))
    for i in range(n):
        m[i, i * n + i] = 1
    return fr.AlgebraData(Obj(be, n), bk.from_matrix(be, m), bk.point(be, np.ones(n)),
                          f"diag({n})")


def group_algebra(table, backend=FHILB, name: str = "") -> fr.AlgebraData:
    """Convolution algebra of a finite group given by its multiplication table.

    The group elements form the orthonormal basis, so in FHilb ``∇∘∆ = |G|·1``
    and the normaliser is ``1/√|G|``; in Rel the algebra is special.
    """
    be = bk.Backend(backend)
    n = len(table)
    m = np.zeros((n, n * n))
    for g in range(n):
        for h in range(n):
            m[table[g][h], g * n + h] = 1
    e = next(g for g in range(n) if all(table[g][h] == h for h in range(n)))
    u = np.zeros(n)
    u[e] = 1
    return fr.AlgebraData(Obj(be, n), bk.from_matrix(be, m), bk.point(be, u), name)


def cyclic(n: int, backend=FHILB) -> fr.AlgebraData:
    return group_algebra(cl.cyclic_table(n), backend, f"Z{n}")


def klein(backend=FHILB) -> fr.AlgebraData:
    return group_algebra(cl.klein_table(), backend, "Z2xZ2")


def matrix_sum(dims, rng=None, weights=None) -> fr.AlgebraData:
    """``⊕ M_{n_k}``, optionally transported along a random unitary change of basis."""
    d = cl.block_algebra(dims, weights)
    if rng is None:
        return d
    n = d.dim
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return fr.rotate(d, q)


def c_plus_m2() -> fr.AlgebraData:
    return cl.block_algebra([1, 2], name="C⊕M2")


def pants_data(n: int, backend=FHILB) -> fr.AlgebraData:
    return fr.pants(Obj(bk.Backend(backend), n)).data


def indiscrete(k: int) -> fr.AlgebraData:
    return cl.groupoid_to_algebra(cl.Groupoid.indiscrete(k))


def algebra_corpus() -> dict:
    """Every shipped algebra by name."""
    out = {}
    for n in (1, 2, 3):
        out[f"pants{n}"] = pants_data(n)
        out[f"pants{n}_rel"] = pants_data(n, REL)
    for n in (2, 3, 4):
        out[f"diag{n}"] = diagonal(n)
    out["diag2_rel"] = diagonal(2, REL)
    out["c_plus_m2"] = c_plus_m2()
    for name, table in (("z2", cl.cyclic_table(2)), ("z3", cl.cyclic_table(3)),
                        ("z2xz2", cl.klein_table())):
        out[name] = group_algebra(table, FHILB, name.upper())
        out[f"{name}_rel"] = group_algebra(table, REL, name.upper())
    for k in (1, 2, 3):
        out[f"indiscrete{k}"] = indiscrete(k)
    out["m1_m1_m2"] = cl.block_algebra([1, 1, 2])
    out["m2_weighted"] = cl.block_algebra([1, 2], weights=[2.0, 0.5], name="C⊕M2 (weighted)")
    return out


@lru_cache(maxsize=None)
def validated_corpus() -> dict:
    return {k: fr.validate(v) for k, v in algebra_corpus().items()}


def groupoid_algebras() -> list:
    return [cl.groupoid_to_algebra(g) for g in cl.groupoid_corpus()]


# -- morphisms -----------------------------------------------------------------------------

def transpose_map(n: int) -> Morphism:
    """``e_ij ↦ e_ji`` on the pants carrier."""
    return bk.permute(FHILB, [n, n], [1, 0])


def depolarizing(n: int, p: float) -> Morphism:
    """``ρ ↦ (1 - p) ρ + p Tr(ρ) I/n`` on the pants carrier."""
    ident = np.eye(n).reshape(-1, 1)
    m = (1 - p) * np.eye(n * n) + p / n * ident @ ident.T
    return bk.fhilb(m)


def unitary_channel(u) -> Morphism:
    u = np.asarray(u, dtype=complex)
    return bk.fhilb(np.kron(u, u.conj()))


def decoherence(n: int) -> Morphism:
    """Measurement ``pants(C^n) -> diag(n)`` keeping the diagonal."""
    m = np.zeros((n, n * n))
    for i in range(n):
        m[i, i * n + i] = 1
    return bk.fhilb(m)


def basis_preparation(n: int) -> Morphism:
    """``diag(n) -> pants(C^n)``, ``e_i ↦ |i⟩⟨i|``."""
    return bk.dagger(decoherence(n))


def trace_map(n: int) -> Morphism:
    return bk.cap(Obj(FHILB, n))


def noisy_measurement(lam: float, n: int = 2) -> Morphism:
    """``λ`` times the projective measurement plus ``(1 - λ)`` times the uniform outcome."""
    uniform = np.full((n, 1), 1 / n) @ np.eye(n).reshape(1, -1)
    return bk.fhilb(lam * decoherence(n).payload + (1 - lam) * uniform)


def stochastic_map(s) -> Morphism:
    """The map on ``diag(n)`` whose matrix in the point basis is ``S``."""
    return bk.fhilb(np.asarray(s, dtype=complex))


def morphism_corpus() -> dict:
    """Named ``(morphism, source name, target name)`` triples over :func:`algebra_corpus`."""
    return {
        "transpose2": (transpose_map(2), "pants2", "pants2"),
        "identity2": (bk.identity(Obj(FHILB, 4)), "pants2", "pants2"),
        "depolarizing2": (depolarizing(2, 0.5), "pants2", "pants2"),
        "decoherence2": (decoherence(2), "pants2", "diag2"),
        "noisy2": (noisy_measurement(0.8), "pants2", "diag2"),
        "trace2": (trace_map(2), "pants2", "pants1"),
        "prepare2": (basis_preparation(2), "diag2", "pants2"),
        "stochastic2": (stochastic_map([[0.3, 0.7], [0.7, 0.3]]), "diag2", "diag2"),
        "g_to_e_rel": (bk.rel([(1, 0)], 2, 2), "z2_rel", "z2_rel"),
    }


def random_stochastic(rng, rows: int, cols: int) -> np.ndarray:
    s = rng.random((rows, cols)) + 1e-3
    return s / s.sum(axis=0, keepdims=True)


def all_relations(n: int, m: int):
    pairs = list(itertools.product(range(n), range(m)))
    for mask in range(1 << len(pairs)):
        yield bk.rel([pairs[i] for i in range(len(pairs)) if mask >> i & 1], n, m)
