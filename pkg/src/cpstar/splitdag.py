"""Splitting dagger idempotents of CPM maps, and the functor ``F`` into it.

``F`` sends a CP* object ``(A, ∇, z)`` to the idempotent
``p = action ∘ z ∘ z ∘ coaction`` on ``A* ⊗ A`` and a CP* morphism ``f`` to
``action_B ∘ z_B ∘ f ∘ z_A ∘ coaction_A``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backends as bk
from . import classify
from . import cpm
from . import cpstar as cs
from . import frobenius as fr
from . import numeric
from . import positivity
from .backends import FHILB, REL, Morphism, Obj
from .errors import CertificateFailure, MembershipFailure, NoSquareRoot
from .numeric import DEFAULT_TOL, Tolerance
from .positivity import CPVerdict

REL_ROOT_SEARCH_LIMIT = 3


# -- algebraic square roots ------------------------------------------------------------

def central_sqrt(f, c: Morphism, tol: Tolerance = DEFAULT_TOL) -> Morphism:
    """A central ``g`` with ``g ∘ g = c`` for central positive-definite ``c``.

    FHilb: ``c`` acts on each matrix block as a positive scalar and ``g``
    takes the scalar square roots blockwise.  Rel: search, starting from the
    identity.
    """
    alg = f.algebra if isinstance(f, cs.CPStarObject) else f
    if not fr.is_central(alg, c, tol):
        raise NoSquareRoot("input is not central")
    if c.backend is REL:
        return _rel_sqrt(alg, c, tol)
    dec = classify.wedderburn(alg, tol)
    blocks = dec.iso.payload @ c.payload @ dec.basis
    roots = []
    for n, off in zip(dec.factor_dims, dec.offsets):
        blk = blocks[off:off + n * n, off:off + n * n]
        lam = np.trace(blk) / (n * n)
        if numeric.sup_norm(blk - lam * np.eye(n * n)) > tol.eq_tol * max(1.0, abs(lam)) * 10:
            raise NoSquareRoot("central map is not blockwise scalar")
        if abs(lam.imag) > tol.eq_tol or lam.real <= tol.psd_tol:
            raise NoSquareRoot(f"block scalar {lam:.3g} is not positive")
        roots.append(np.full(n * n, np.sqrt(lam.real)))
    g = bk.fhilb(dec.basis @ np.diag(np.concatenate(roots)) @ dec.iso.payload)
    if not bk.equal(g @ g, c, tol) or not fr.is_central(alg, g, tol):
        raise NoSquareRoot("blockwise root failed to verify")
    return g


def _rel_sqrt(alg, c, tol) -> Morphism:
    a = alg.carrier
    ident = bk.identity(a)
    if bk.equal(c, ident):
        return ident
    n = a.dim
    if n > REL_ROOT_SEARCH_LIMIT:
        raise NoSquareRoot(f"relational root search limited to carriers of size "
                           f"{REL_ROOT_SEARCH_LIMIT}")
    cells = n * n
    for mask in range(1 << cells):
        g = bk.rel_from_bool(np.array([(mask >> i) & 1 for i in range(cells)],
                                      dtype=bool).reshape(n, n))
        if bk.equal(g @ g, c) and fr.is_central(alg, g, tol):
            return g
    raise NoSquareRoot("no central relation squares to the input")


def certify_normaliser(a, tol: Tolerance = DEFAULT_TOL) -> CPVerdict:
    """``z = s ∘ s`` with ``s`` a central root; ``z`` and ``s`` must both be CP*."""
    a = cs.as_object(a)
    s = central_sqrt(a, a.normaliser, tol)
    vs = cs.check_cpstar(s, a, a, tol)
    vz = cs.check_cpstar(a.normaliser, a, a, tol)
    if not (vs.ok and vz.ok):
        raise CertificateFailure("normaliser or its root is not CP*")
    return vz


# -- split objects and morphisms -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DaggerIdempotent:
    p: Morphism
    base_dim: int
    certificate: CPVerdict

    @property
    def rank(self) -> int:
        if self.p.backend is FHILB:
            return numeric.numerical_rank(self.p.payload)
        return int(np.linalg.matrix_rank(self.p.matrix.astype(float)))


@dataclass(frozen=True, eq=False)
class SplitMorphism:
    f: Morphism
    source: DaggerIdempotent
    target: DaggerIdempotent


def is_dagger_idempotent(p: Morphism, tol: Tolerance = DEFAULT_TOL) -> bool:
    return bk.equal(p @ p, p, tol) and bk.equal(bk.dagger(p), p, tol)


def make_idempotent(p: Morphism, base_dim: int, tol: Tolerance = DEFAULT_TOL) -> DaggerIdempotent:
    if not is_dagger_idempotent(p, tol):
        raise CertificateFailure("p is not a dagger idempotent")
    v = positivity.check_cpm(p, base_dim, base_dim, tol)
    if not v.ok:
        raise CertificateFailure(f"idempotent is not completely positive: {v.reason}")
    return DaggerIdempotent(p, base_dim, v)


def functor_F_object(a, tol: Tolerance = DEFAULT_TOL) -> DaggerIdempotent:
    a = cs.as_object(a)
    z = a.normaliser
    act, coact = fr.action(a.algebra), fr.coaction(a.algebra)
    p = act @ z @ z @ coact
    alt = act @ coact @ bk.tensor(bk.conjugate(z), z)
    if not bk.equal(p, alt, tol):
        raise CertificateFailure("the two forms of the F-idempotent disagree")
    return make_idempotent(p, a.dim, tol)


def split_membership(f: Morphism, p: DaggerIdempotent, q: DaggerIdempotent,
                     tol: Tolerance = DEFAULT_TOL) -> bool:
    """``q ∘ f ∘ p = f``."""
    return bk.equal(q.p @ f @ p.p, f, tol)


def make_split(f: Morphism, p: DaggerIdempotent, q: DaggerIdempotent,
               tol: Tolerance = DEFAULT_TOL) -> SplitMorphism:
    if not split_membership(f, p, q, tol):
        raise MembershipFailure("q ∘ f ∘ p differs from f")
    v = positivity.check_cpm(f, p.base_dim, q.base_dim, tol)
    if not v.ok:
        raise CertificateFailure(f"split morphism is not completely positive: {v.reason}")
    return SplitMorphism(f, p, q)


def F_map(f: Morphism, a, b) -> Morphism:
    """``action_B ∘ z_B ∘ f ∘ z_A ∘ coaction_A`` without any certification."""
    a, b = cs.as_object(a), cs.as_object(b)
    return bk.compose_all(fr.action(b.algebra), b.normaliser, f, a.normaliser,
                          fr.coaction(a.algebra))


def functor_F_morphism(f: cs.CPStarMorphism, tol: Tolerance = DEFAULT_TOL) -> SplitMorphism:
    p = functor_F_object(f.source, tol)
    q = functor_F_object(f.target, tol)
    return make_split(F_map(f.f, f.source, f.target), p, q, tol)


def compose_split(g: SplitMorphism, f: SplitMorphism,
                  tol: Tolerance = DEFAULT_TOL) -> SplitMorphism:
    if not bk.equal(f.target.p, g.source.p, tol):
        raise MembershipFailure("middle idempotents differ")
    return make_split(g.f @ f.f, f.source, g.target, tol)


def cpstar_vs_split(f: Morphism, a, b, tol: Tolerance = DEFAULT_TOL) -> tuple:
    """``(CP* verdict, Split† verdict)`` for ``f: A -> B``; the two must coincide."""
    a, b = cs.as_object(a), cs.as_object(b)
    left = cs.check_cpstar(f, a, b, tol).ok
    p, q = functor_F_object(a, tol), functor_F_object(b, tol)
    h = F_map(f, a, b)
    right = split_membership(h, p, q, tol) and positivity.check_cpm(h, a.dim, b.dim, tol).ok
    return left, right


# -- F ∘ L versus the inclusion ----------------------------------------------------------

@dataclass(frozen=True)
class FLReport:
    samples: int
    max_naturality_error: float
    unitary_error: float
    projection_error: float
    witness_cpm: bool
    tolerance: float

    @property
    def ok(self) -> bool:
        return (self.max_naturality_error <= self.tolerance
                and self.unitary_error <= self.tolerance
                and self.projection_error <= self.tolerance and self.witness_cpm)


def FL_witness(x) -> Morphism:
    """``u_X = action ∘ z: X* ⊗ X -> A* ⊗ A`` for ``A = L(X)``; ``u†u = 1`` and ``u u† = p``."""
    a = cpm.embed_object(x)
    return fr.action(a.algebra) @ a.normaliser


def FL_vs_inclusion_probe(x, y=None, samples: int = 20, rng=None, tol: float = 1e-8) -> FLReport:
    """Check ``F(L h) ∘ u_X = u_Y ∘ h`` for random CPM maps ``h: X -> Y``."""
    x = cpm._obj(x)
    y = x if y is None else cpm._obj(y)
    rng = np.random.default_rng(0) if rng is None else rng
    a, b = cpm.embed_object(x), cpm.embed_object(y)
    ux, uy = FL_witness(x), FL_witness(y)
    p = functor_F_object(a).p
    unitary_err = bk.distance(bk.dagger(ux) @ ux, bk.identity(ux.source))
    proj_err = bk.distance(ux @ bk.dagger(ux), p)
    witness_cpm = positivity.check_cpm(ux, x.dim, a.dim).ok
    worst = 0.0
    hs = [bk.identity(Obj(FHILB, x.dim * x.dim))] if x == y else []
    hs += [cs.random_cpm(x.dim, y.dim, rng) for _ in range(samples)]
    for h in hs:
        lhs = F_map(h, a, b) @ ux
        rhs = uy @ h
        scale = max(1.0, numeric.sup_norm(h.payload))
        worst = max(worst, bk.distance(lhs, rhs) / scale)
    return FLReport(len(hs), worst, unitary_err, proj_err, witness_cpm, tol)
