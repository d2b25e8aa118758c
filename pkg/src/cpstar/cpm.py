"""Completely positive maps ``X* ⊗ X -> Y* ⊗ Y`` and their embedding into CP*.

Objects ``X`` go to the pants algebra on ``X* ⊗ X`` and morphisms go to
themselves, so the embedding is faithful by construction.  Fullness is
probed by sampling in both directions.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import backends as bk
from . import classify
from . import cpstar as cs
from . import frobenius as fr
from . import numeric
from . import positivity
from .backends import FHILB, REL, Morphism, Obj
from .errors import CertificateFailure, ShapeMismatch
from .numeric import DEFAULT_TOL, Tolerance
from .positivity import CPVerdict

REL_EXHAUSTIVE_LIMIT = 16


def _obj(x, backend=FHILB) -> Obj:
    return x if isinstance(x, Obj) else Obj(backend, int(x))


@dataclass(frozen=True, eq=False)
class CPMMorphism:
    h: Morphism
    source: Obj
    target: Obj
    certificate: CPVerdict


def check_cpm(h: Morphism, x, y, tol: Tolerance = DEFAULT_TOL) -> CPVerdict:
    x, y = _obj(x, h.backend), _obj(y, h.backend)
    return positivity.check_cpm(h, x.dim, y.dim, tol)


def certify_cpm(h: Morphism, x, y, tol: Tolerance = DEFAULT_TOL) -> CPMMorphism:
    x, y = _obj(x, h.backend), _obj(y, h.backend)
    v = check_cpm(h, x, y, tol)
    if not v.ok:
        raise CertificateFailure(f"not completely positive: {v.reason}")
    return CPMMorphism(h, x, y, v)


def compose_cpm(g: CPMMorphism, f: CPMMorphism, tol: Tolerance = DEFAULT_TOL) -> CPMMorphism:
    if f.target != g.source:
        raise ShapeMismatch("compose_cpm: incompatible objects")
    return certify_cpm(g.h @ f.h, f.source, g.target, tol)


def dagger_cpm(f: CPMMorphism, tol: Tolerance = DEFAULT_TOL) -> CPMMorphism:
    return certify_cpm(bk.dagger(f.h), f.target, f.source, tol)


@functools.lru_cache(maxsize=None)
def embed_object(x) -> cs.CPStarObject:
    """The pants algebra on ``X* ⊗ X`` with its canonical normaliser."""
    return cs.CPStarObject(fr.pants(_obj(x)))


def embed_morphism(h, x=None, y=None, tol: Tolerance = DEFAULT_TOL) -> cs.CPStarMorphism:
    if isinstance(h, CPMMorphism):
        h, x, y = h.h, h.source, h.target
    x, y = _obj(x, h.backend), _obj(y, h.backend)
    return cs.certify(h, embed_object(x), embed_object(y), tol)


# -- monoidal structure -------------------------------------------------------------

def phi(x, y) -> Morphism:
    """``(X ⊗ Y)* ⊗ (X ⊗ Y) -> (X* ⊗ X) ⊗ (Y* ⊗ Y)``: legs ``(x', y', x, y) ↦ (x', x, y', y)``."""
    x, y = _obj(x), _obj(y)
    bk._same_backend(x, y)
    return bk.permute(x.backend, [x.dim, y.dim, x.dim, y.dim], [0, 2, 1, 3])


def monoidal_structure_map(x, y, tol: Tolerance = DEFAULT_TOL) -> cs.CPStarMorphism:
    """``φ_{X,Y}`` certified as a CP* morphism ``L(X ⊗ Y) -> L(X) ⊗ L(Y)``."""
    x, y = _obj(x), _obj(y)
    src = embed_object(x @ y)
    tgt = cs.product_object(embed_object(x), embed_object(y))
    return cs.certify(phi(x, y), src, tgt, tol)


@dataclass(frozen=True)
class PhiReport:
    unitary: bool
    star_homomorphism: bool
    certified: bool

    @property
    def ok(self) -> bool:
        return self.unitary and self.star_homomorphism and self.certified


PHI_CERTIFY_LIMIT = 6


def check_phi(x, y, tol: Tolerance = DEFAULT_TOL, certify: bool | None = None) -> PhiReport:
    """Unitarity, the *-homomorphism property and (for small dims) an explicit CP* certificate.

    The certificate needs an eigendecomposition of size ``(dim X · dim Y)⁴``;
    by default it is computed only when ``dim X · dim Y ≤ PHI_CERTIFY_LIMIT``,
    otherwise ``certified`` mirrors the *-homomorphism verdict, which implies it.
    """
    x, y = _obj(x), _obj(y)
    if certify is None:
        certify = x.dim * y.dim <= PHI_CERTIFY_LIMIT
    p = phi(x, y)
    unitary = (bk.equal(bk.dagger(p) @ p, bk.identity(p.source), tol)
               and bk.equal(p @ bk.dagger(p), bk.identity(p.target), tol))
    src = embed_object(x @ y)
    tgt = cs.product_object(embed_object(x), embed_object(y))
    hom = cs.check_star_homomorphism(p, src, tgt, tol).ok
    cert = cs.check_cpstar(p, src, tgt, tol).ok if certify else hom
    return PhiReport(unitary, hom, cert)


def cpm_tensor(h1, h2, tol: Tolerance = DEFAULT_TOL) -> CPMMorphism:
    """``φ_{Y1,Y2}† ∘ (h1 ⊗ h2) ∘ φ_{X1,X2}``, re-certified."""
    if not isinstance(h1, CPMMorphism) or not isinstance(h2, CPMMorphism):
        raise TypeError("cpm_tensor takes certified CPMMorphism values")
    px = phi(h1.source, h2.source)
    py = phi(h1.target, h2.target)
    h = bk.dagger(py) @ bk.tensor(h1.h, h2.h) @ px
    return certify_cpm(h, h1.source @ h2.source, h1.target @ h2.target, tol)


def coherence_checks(x, y, z) -> dict:
    """Sampled coherence of ``φ`` with the associator, unitors and symmetry."""
    x, y, z = _obj(x), _obj(y), _obj(z)
    be = x.backend
    one = bk.unit_object(be)
    idm = lambda o: bk.identity(o @ o)
    out = {}
    lhs = bk.tensor(phi(x, y), idm(z)) @ phi(x @ y, z)
    rhs = bk.tensor(idm(x), phi(y, z)) @ phi(x, y @ z)
    out["associativity"] = bk.equal(lhs, rhs)
    out["left_unit"] = bk.equal(phi(one, x), idm(x))
    out["right_unit"] = bk.equal(phi(x, one), idm(x))
    sw = bk.swap(x, y)
    induced = bk.tensor(bk.conjugate(sw), sw)
    out["symmetry"] = bk.equal(phi(y, x) @ induced,
                               bk.swap(x @ x, y @ y) @ phi(x, y))
    return out


# -- fullness --------------------------------------------------------------------------

@dataclass(frozen=True)
class FullnessReport:
    samples: int
    cpstar_to_cpm_failures: int
    cpm_to_cpstar_failures: int
    rejections_agree: bool
    exhaustive: bool = False

    @property
    def ok(self) -> bool:
        return (self.cpstar_to_cpm_failures == 0 and self.cpm_to_cpstar_failures == 0
                and self.rejections_agree)


def fullness_probe(x, y, samples: int = 100, rng=None,
                   tol: Tolerance = DEFAULT_TOL) -> FullnessReport:
    """Both directions of the embedding between pants objects.

    FHilb: ``samples`` random CP* morphisms must pass the CPM test, ``samples``
    random CPM maps must pass the CP* test, and an equal number of arbitrary
    maps must get the same verdict from both.  Rel: every relation is tried
    when there are at most ``2**REL_EXHAUSTIVE_LIMIT``.
    """
    x, y = _obj(x), _obj(y)
    a, b = embed_object(x), embed_object(y)
    rng = np.random.default_rng(0) if rng is None else rng
    if x.backend is REL:
        return _fullness_rel(x, y, a, b, samples, rng, tol)
    fwd = bwd = 0
    agree = True
    for _ in range(samples):
        f = cs.random_cpstar(a, b, rng)
        if not check_cpm(f, x, y, tol).ok:
            fwd += 1
        h = cs.random_cpm(x.dim, y.dim, rng)
        if not cs.check_cpstar(h, a, b, tol).ok:
            bwd += 1
        g = bk.fhilb(numeric.random_complex(rng, (b.dim, a.dim)))
        if check_cpm(g, x, y, tol).ok != cs.check_cpstar(g, a, b, tol).ok:
            agree = False
    return FullnessReport(samples, fwd, bwd, agree)


def _fullness_rel(x, y, a, b, samples, rng, tol) -> FullnessReport:
    n, m = a.dim, b.dim
    cells = n * m
    exhaustive = cells <= REL_EXHAUSTIVE_LIMIT
    if exhaustive:
        masks = range(1 << cells)
    else:
        masks = (int(v) for v in rng.integers(0, 1 << min(cells, 62), size=samples))
    fwd = bwd = 0
    agree = True
    count = 0
    for mask in masks:
        mat = np.array([(mask >> i) & 1 for i in range(cells)], dtype=bool).reshape(m, n)
        h = bk.rel_from_bool(mat)
        p, q = check_cpm(h, x, y, tol).ok, cs.check_cpstar(h, a, b, tol).ok
        count += 1
        if p and not q:
            bwd += 1
        if q and not p:
            fwd += 1
        agree = agree and p == q
    return FullnessReport(count, fwd, bwd, agree, exhaustive)


# -- essential image ---------------------------------------------------------------------

@dataclass(frozen=True)
class EssentialImageReport:
    dim: int
    square_candidates: tuple
    factor_dims: tuple
    in_image: bool
    reason: str


def essential_image_test(a, tol: Tolerance = DEFAULT_TOL) -> EssentialImageReport:
    """Is the FHilb object ``A`` isomorphic to some pants object?

    An isomorphism would be a linear bijection onto ``C^n* ⊗ C^n``, so ``dim A``
    must equal ``n²``; if it does, the block structure must be the single
    factor ``[n]``.
    """
    a = cs.as_object(a)
    d = a.dim
    root = int(round(np.sqrt(d)))
    candidates = (root,) if root * root == d else ()
    dec = classify.wedderburn(a.algebra, tol)
    if not candidates:
        return EssentialImageReport(d, (), dec.factor_dims, False,
                                    f"dim {d} is not a perfect square")
    if dec.factor_dims != (root,):
        return EssentialImageReport(d, candidates, dec.factor_dims, False,
                                    f"factors {list(dec.factor_dims)} differ from [{root}]")
    return EssentialImageReport(d, candidates, dec.factor_dims, True, f"isomorphic to L(C^{root})")
