"""The CP*-condition and the category operations built on it.

A morphism ``f: A -> B`` between normalisable dagger Frobenius algebras is
accepted when its lift ``action_B ∘ f ∘ coaction_A`` has CPM form.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backends as bk
from . import frobenius as fr
from . import numeric
from . import positivity
from .backends import FHILB, REL, Morphism, Obj
from .errors import CertificateFailure, NotNormalisable, ShapeMismatch
from .numeric import DEFAULT_TOL, Tolerance
from .positivity import CPVerdict


@dataclass(frozen=True, eq=False)
class CPStarObject:
    algebra: fr.FrobeniusAlgebra

    def __post_init__(self):
        if not isinstance(self.algebra, fr.FrobeniusAlgebra):
            raise TypeError("CPStarObject wraps a validated FrobeniusAlgebra")
        if self.algebra.normaliser is None:
            raise NotNormalisable(f"{self.algebra.name or 'algebra'} has no normaliser")

    carrier = property(lambda self: self.algebra.carrier)
    dim = property(lambda self: self.algebra.dim)
    backend = property(lambda self: self.algebra.backend)
    normaliser = property(lambda self: self.algebra.normaliser)
    name = property(lambda self: self.algebra.name)

    def identity(self) -> Morphism:
        return self.algebra.identity()


def as_object(a) -> CPStarObject:
    if isinstance(a, CPStarObject):
        return a
    if isinstance(a, fr.FrobeniusAlgebra):
        return CPStarObject(a)
    if isinstance(a, fr.AlgebraData):
        return CPStarObject(fr.validate(a))
    raise TypeError(f"cannot interpret {type(a).__name__} as a CP* object")


@functools.lru_cache(maxsize=None)
def trivial_object(backend) -> CPStarObject:
    return CPStarObject(fr.trivial_algebra(bk.Backend(backend)))


@functools.lru_cache(maxsize=256)
def _product(a: CPStarObject, b: CPStarObject) -> CPStarObject:
    return CPStarObject(fr.product_algebra(a.algebra, b.algebra))


def product_object(a, b) -> CPStarObject:
    return _product(as_object(a), as_object(b))


def _endpoints(f: Morphism, a: CPStarObject, b: CPStarObject):
    if f.source != a.carrier or f.target != b.carrier:
        raise ShapeMismatch(f"f is {f.source.dim} -> {f.target.dim}, objects are "
                            f"{a.dim} -> {b.dim}")


def lift(f: Morphism, a, b) -> Morphism:
    """``action_B ∘ f ∘ coaction_A: A* ⊗ A -> B* ⊗ B``."""
    a, b = as_object(a), as_object(b)
    _endpoints(f, a, b)
    return fr.action(b.algebra) @ f @ fr.coaction(a.algebra)


def unlift(h: Morphism, a, b) -> Morphism:
    """``z_B² ∘ coaction_B ∘ h ∘ action_A ∘ z_A²``, a left inverse of :func:`lift`."""
    a, b = as_object(a), as_object(b)
    za, zb = a.normaliser, b.normaliser
    return bk.compose_all(zb, zb, fr.coaction(b.algebra), h, fr.action(a.algebra), za, za)


def check_cpstar(f: Morphism, a, b, tol: Tolerance = DEFAULT_TOL) -> CPVerdict:
    a, b = as_object(a), as_object(b)
    return positivity.check_cpm(lift(f, a, b), a.dim, b.dim, tol, method="rearrange")


def check_cpstar_convolution(f: Morphism, a, b, tol: Tolerance = DEFAULT_TOL) -> CPVerdict:
    """Decide the condition through the normaliser-corrected inverse of the lift.

    Project the lift onto CPM form (PSD clipping in FHilb, largest union of
    squares in Rel), map back with :func:`unlift` and accept iff ``f`` is
    recovered.  Since ``unlift ∘ lift = 1`` and ``lift ∘ unlift`` is
    conjugation by the completely positive idempotent ``action ∘ z² ∘ coaction``,
    this holds exactly for morphisms whose lift already had CPM form.
    """
    a, b = as_object(a), as_object(b)
    h = lift(f, a, b)
    n, m = a.dim, b.dim
    if f.backend is FHILB:
        kp = bk.fhilb(positivity.positive_part(h, n, m))
        back = unlift(kp, a, b)
        err = bk.distance(back, f)
        c_scale = max(1.0, numeric.sup_norm(h.payload))
        bound = (tol.psd_tol * c_scale * n * m
                 + tol.eq_tol * max(1.0, numeric.sup_norm(f.payload)))
        return CPVerdict(err <= bound, "convolution", min_eig=None,
                         reason="" if err <= bound else f"projection residual {err:.3g}")
    kp = positivity.largest_cpm_subrelation(h, n, m)
    back = unlift(kp, a, b)
    ok = bk.equal(back, f)
    return CPVerdict(ok, "convolution",
                     reason="" if ok else f"recovered relation differs in "
                                          f"{int(bk.distance(back, f))} pairs")


@dataclass(frozen=True, eq=False)
class CPStarMorphism:
    f: Morphism
    source: CPStarObject
    target: CPStarObject
    certificate: CPVerdict

    def reverify(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        """Recheck that the stored witness still recomposes to the lift."""
        w = self.certificate.witness
        if w is None:
            return False
        h = lift(self.f, self.source, self.target)
        back = bk.superop_from_kraus(w, self.certificate.witness_dim, self.target.dim)
        if h.backend is REL:
            return bk.equal(back, h)
        return bk.distance(back, h) <= positivity.recomposition_tol(h, tol, self.source.dim,
                                                                   self.target.dim)


def certify(f: Morphism, a, b, tol: Tolerance = DEFAULT_TOL) -> CPStarMorphism:
    a, b = as_object(a), as_object(b)
    v = check_cpstar(f, a, b, tol)
    if not v.ok:
        raise CertificateFailure(f"not a CP* morphism: {v.reason}")
    return CPStarMorphism(f, a, b, v)


def identity_cp(a, tol: Tolerance = DEFAULT_TOL) -> CPStarMorphism:
    a = as_object(a)
    return certify(a.identity(), a, a, tol)


def compose_cp(g: CPStarMorphism, f: CPStarMorphism,
               tol: Tolerance = DEFAULT_TOL) -> CPStarMorphism:
    if f.target is not g.source and f.target.carrier != g.source.carrier:
        raise ShapeMismatch("compose_cp: incompatible middle objects")
    return certify(g.f @ f.f, f.source, g.target, tol)


def tensor_cp(f: CPStarMorphism, g: CPStarMorphism,
              tol: Tolerance = DEFAULT_TOL) -> CPStarMorphism:
    src = product_object(f.source, g.source)
    tgt = product_object(f.target, g.target)
    return certify(bk.tensor(f.f, g.f), src, tgt, tol)


def dagger_cp(f: CPStarMorphism, tol: Tolerance = DEFAULT_TOL) -> CPStarMorphism:
    return certify(bk.dagger(f.f), f.target, f.source, tol)


def swap_cp(a, b, tol: Tolerance = DEFAULT_TOL) -> CPStarMorphism:
    a, b = as_object(a), as_object(b)
    return certify(bk.swap(a.carrier, b.carrier), product_object(a, b), product_object(b, a), tol)


def dual_object(a) -> CPStarObject:
    return CPStarObject(fr.dual_algebra(as_object(a).algebra))


def cap_cp(a, tol: Tolerance = DEFAULT_TOL) -> CPStarMorphism:
    """The counit of the duality ``A ⊗ A* -> I`` as a CP* morphism."""
    a = as_object(a)
    return certify(bk.cap(a.carrier), product_object(a, dual_object(a)),
                   trivial_object(a.backend), tol)


# -- positive elements ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PositiveElement:
    point: Morphism
    owner: CPStarObject
    certificate: CPVerdict


def is_positive_element(p: Morphism, a, tol: Tolerance = DEFAULT_TOL) -> CPVerdict:
    a = as_object(a)
    return check_cpstar(p, trivial_object(a.backend), a, tol)


def positive_element(p: Morphism, a, tol: Tolerance = DEFAULT_TOL) -> PositiveElement:
    a = as_object(a)
    v = is_positive_element(p, a, tol)
    if not v.ok:
        raise CertificateFailure(f"point is not positive: {v.reason}")
    return PositiveElement(p, a, v)


def is_normalised(f: Morphism, a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``ε_B ∘ f = ε_A``."""
    a, b = as_object(a), as_object(b)
    _endpoints(f, a, b)
    return bk.equal(b.algebra.counit @ f, a.algebra.counit, tol)


# -- *-homomorphisms ----------------------------------------------------------------

@dataclass(frozen=True)
class StarHomReport:
    multiplicative: bool
    unital: bool
    star_compatible: bool

    @property
    def ok(self) -> bool:
        return self.multiplicative and self.unital and self.star_compatible

    def __bool__(self):
        return self.ok


def check_star_homomorphism(f: Morphism, a, b, tol: Tolerance = DEFAULT_TOL) -> StarHomReport:
    da, db = fr._data(a.algebra if isinstance(a, CPStarObject) else a), \
        fr._data(b.algebra if isinstance(b, CPStarObject) else b)
    if f.source != da.carrier or f.target != db.carrier:
        raise ShapeMismatch("f does not match the algebras")
    be = f.backend
    fa = fr._arr(f)
    lhs = np.einsum("ak,kij->aij", fa, da.structure)
    rhs = np.einsum("apq,pi,qj->aij", db.structure, fa, fa, optimize=True)
    mult = fr._close(be, lhs, rhs, tol)
    unital = fr._close(be, fa @ da.unit_vec, db.unit_vec, tol)
    # star is antilinear: x* = Sᵀ conj(x), so f(x*) = f(x)* for all x iff f Sᵀ = S'ᵀ conj(f)
    sa, sb = fr._copairing(da), fr._copairing(db)
    star_ok = fr._close(be, fa @ sa.T, sb.T @ np.conj(fa), tol)
    return StarHomReport(mult, unital, star_ok)


# -- positive-elements criterion ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProbeResult:
    criterion_a: bool
    criterion_c: bool
    elements_checked: int
    complete: bool
    counterexample: Optional[tuple] = None

    @property
    def agree(self) -> bool:
        return self.criterion_a == self.criterion_c

    def __bool__(self):
        return self.agree


REL_PROBE_EXHAUSTIVE = 12


@functools.lru_cache(maxsize=None)
def _pants_object(backend, n: int) -> CPStarObject:
    return CPStarObject(fr.pants(Obj(bk.Backend(backend), n)))


def _probe_elements_fhilb(a: CPStarObject, n: int, samples: int, rng, dec):
    """Choi-type elements per block of ``A`` that fits in ``M_n``, plus random ``y* y``."""
    ax = _product(a, _pants_object(FHILB, n))
    out = []
    if dec is not None:
        for k, nk in enumerate(dec.factor_dims):
            if nk > n:
                continue
            off = dec.offsets[k]
            rho = np.zeros(ax.dim, dtype=complex)
            for i in range(nk):
                for j in range(nk):
                    e = dec.basis[:, off + i * nk + j]
                    ej = np.zeros(n * n)
                    ej[i * n + j] = 1
                    rho += np.kron(e, ej)
            out.append(bk.point(FHILB, rho))
    for _ in range(samples):
        y = bk.point(FHILB, numeric.random_complex(rng, ax.dim))
        out.append(fr.multiply(ax.algebra, fr.star(ax.algebra, y), y))
    return ax, out


def _probe_elements_rel(a: CPStarObject, n: int, samples: int, rng):
    ax = _product(a, _pants_object(REL, n))
    d = ax.dim
    if d <= REL_PROBE_EXHAUSTIVE:
        subsets = [np.array([(mask >> i) & 1 for i in range(d)], dtype=bool)
                   for mask in range(1, 1 << d)]
    else:
        subsets = [rng.random(d) < 0.3 for _ in range(samples)]
    out = []
    for s in subsets:
        y = bk.point(REL, s)
        out.append(fr.multiply(ax.algebra, fr.star(ax.algebra, y), y))
    return ax, out


def pos_elems_equivalence_probe(f: Morphism, a, b, max_dim: int = 3, samples: int = 4,
                                rng=None, tol: Tolerance = DEFAULT_TOL,
                                decomposition=None) -> ProbeResult:
    """Compare the CP* condition (a) with positivity of ``f ⊗ 1_{X*⊗X}`` on positive elements (c).

    In FHilb the constructed elements include, for each matrix block of ``A``
    that fits, the block's Choi element; once every block fits (``complete``)
    criterion (c) is decided exactly rather than sampled.
    """
    from . import classify

    a, b = as_object(a), as_object(b)
    rng = np.random.default_rng(0) if rng is None else rng
    verdict_a = check_cpstar(f, a, b, tol).ok
    dec = None
    complete = False
    if f.backend is FHILB:
        dec = decomposition or classify.wedderburn(a.algebra, tol)
        complete = max(dec.factor_dims) <= max_dim
    else:
        # every point y is enumerated only while the product carrier stays small
        complete = all(a.dim * n ** 2 <= REL_PROBE_EXHAUSTIVE for n in range(1, max_dim + 1))
    checked = 0
    for n in range(1, max_dim + 1):
        if f.backend is FHILB:
            ax, elems = _probe_elements_fhilb(a, n, samples, rng, dec)
        else:
            ax, elems = _probe_elements_rel(a, n, samples, rng)
        bx = _product(b, _pants_object(f.backend, n))
        fx = bk.tensor(f, bk.identity(Obj(f.backend, n * n)))
        for rho in elems:
            if not is_positive_element(rho, ax, tol):
                raise CertificateFailure("probe produced a non-positive element")
            checked += 1
            image = fx @ rho
            v = is_positive_element(image, bx, tol)
            if not v.ok:
                return ProbeResult(verdict_a, False, checked, complete,
                                   (n, rho, v.min_eig if v.min_eig is not None else v.failing))
    return ProbeResult(verdict_a, True, checked, complete)


# -- sampling ---------------------------------------------------------------------------

def random_cpm(n: int, m: int, rng, rank: int | None = None) -> Morphism:
    """Random map ``n*⊗n -> m*⊗m`` in Kraus form, the witness taken from a PSD factor of ``G† G``."""
    rank = int(rng.integers(1, n * m + 1)) if rank is None else rank
    g = numeric.random_complex(rng, (rank, n * m))
    k = numeric.psd_factor(g.conj().T @ g)
    r = k.shape[0]
    return bk.superop_from_kraus(bk.fhilb(k.reshape(r * m, n)), r, m)


def random_cpstar(a, b, rng, rank: int | None = None) -> Morphism:
    """A CP* morphism ``unlift(K)`` for a random CPM ``K``; its lift is ``p_B ∘ K ∘ p_A``."""
    a, b = as_object(a), as_object(b)
    return unlift(random_cpm(a.dim, b.dim, rng, rank), a, b)


def random_hermitian_preserving(a, b, rng) -> Morphism:
    """Like :func:`random_cpstar` but with an indefinite Hermitian rearrangement."""
    a, b = as_object(a), as_object(b)
    n, m = a.dim, b.dim
    g = numeric.random_complex(rng, (n * m, n * m))
    signs = rng.choice([-1.0, 1.0], size=n * m)
    c = g.conj().T @ (signs[:, None] * g)
    return unlift(bk.fhilb(numeric.unreshuffle(c, (n, m))), a, b)
