"""Frobenius algebras: axiom checks, normaliser solving and the canonical constructions.

An algebra is given by its multiplication ``∇: A ⊗ A -> A`` and unit
``I -> A``; the comultiplication and counit are always the daggers of these.
Internally everything is computed from the structure constants
``M[k, i, j]`` (coefficient of ``e_k`` in ``e_i · e_j``).  In Rel the same
contractions run over nonnegative integers and are read back as "> 0", which
is exactly relational composition.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import backends as bk
from . import numeric
from .backends import FHILB, REL, Morphism, Obj
from .errors import (NotHermitian, NotNormalisable, NotPSD, NotValidated, ShapeMismatch,
                     Singular)
from .numeric import DEFAULT_TOL, Tolerance

RELATION_SEARCH_LIMIT = 6
COPYABLE_SUBSET_LIMIT = 16
COPYABLE_RETRIES = 8
EXACT_AXIOM_DIM = 32
RANDOM_PROBES = 4


def _arr(m: Morphism) -> np.ndarray:
    if m.backend is FHILB:
        return m.payload
    return m.matrix.astype(np.int64)


def _out(backend, a) -> Morphism:
    return bk.from_matrix(backend, np.asarray(a) if backend is FHILB else np.asarray(a) > 0)


def _close(backend, x, y, tol: Tolerance) -> bool:
    if backend is REL:
        return np.array_equal(np.asarray(x) > 0, np.asarray(y) > 0)
    x, y = np.asarray(x), np.asarray(y)
    scale = max(1.0, numeric.sup_norm(x), numeric.sup_norm(y))
    return numeric.sup_norm(x - y) <= tol.eq_tol * scale


def _gap(backend, x, y) -> float:
    if backend is REL:
        return float(np.sum((np.asarray(x) > 0) != (np.asarray(y) > 0)))
    return numeric.sup_norm(np.asarray(x) - np.asarray(y))


@dataclass(frozen=True, eq=False)
class AlgebraData:
    carrier: Obj
    mult: Morphism
    unit: Morphism
    name: str = ""

    def __post_init__(self):
        a = self.carrier
        bk._same_backend(a, self.mult, self.unit)
        if self.mult.source != a @ a or self.mult.target != a:
            raise ShapeMismatch("multiplication must be A ⊗ A -> A")
        if self.unit.source.dim != 1 or self.unit.target != a:
            raise ShapeMismatch("unit must be I -> A")
        n = a.dim
        object.__setattr__(self, "structure", _arr(self.mult).reshape(n, n, n))
        object.__setattr__(self, "unit_vec", _arr(self.unit).ravel())

    @property
    def backend(self):
        return self.carrier.backend

    @property
    def dim(self) -> int:
        return self.carrier.dim

    @property
    def comult(self) -> Morphism:
        return bk.dagger(self.mult)

    @property
    def counit(self) -> Morphism:
        return bk.dagger(self.unit)

    def identity(self) -> Morphism:
        return bk.identity(self.carrier)


@dataclass(frozen=True)
class FrobeniusReport:
    associativity: bool
    unitality: bool
    frobenius_law: bool
    dagger_ok: bool
    residuals: dict = field(default_factory=dict)
    method: str = "exact"

    @property
    def ok(self) -> bool:
        return self.associativity and self.unitality and self.frobenius_law and self.dagger_ok

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class FrobeniusAlgebra:
    """A validated dagger Frobenius algebra, optionally with its normaliser."""

    data: AlgebraData
    report: FrobeniusReport
    symmetric: bool
    special: bool
    commutative: bool
    normaliser: Optional[Morphism] = None
    pants_base: Optional[Obj] = None

    dagger_frobenius = property(lambda self: self.report.ok)
    carrier = property(lambda self: self.data.carrier)
    mult = property(lambda self: self.data.mult)
    unit = property(lambda self: self.data.unit)
    comult = property(lambda self: self.data.comult)
    counit = property(lambda self: self.data.counit)
    backend = property(lambda self: self.data.backend)
    dim = property(lambda self: self.data.dim)
    name = property(lambda self: self.data.name)
    structure = property(lambda self: self.data.structure)

    @property
    def normalisable(self) -> bool:
        return self.normaliser is not None

    def identity(self) -> Morphism:
        return self.data.identity()


def _data(f) -> AlgebraData:
    return f.data if isinstance(f, FrobeniusAlgebra) else f


def _require_validated(f):
    if not isinstance(f, FrobeniusAlgebra):
        raise NotValidated("run check_frobenius/validate first")
    return f


# -- axioms ------------------------------------------------------------------

def _exact_axioms(d: AlgebraData, tol):
    be, m = d.backend, d.structure
    mc = np.conj(m)
    res, ok = {}, {}
    lhs = np.einsum("mij,kml->kijl", m, m)
    rhs = np.einsum("mjl,kim->kijl", m, m)
    res["associativity"], ok["associativity"] = _gap(be, lhs, rhs), _close(be, lhs, rhs, tol)
    middle = np.einsum("mpq,mij->pqij", mc, m)
    f1 = np.einsum("ipr,qrj->pqij", mc, m)
    f2 = np.einsum("pir,jrq->pqij", m, mc)
    res["frobenius_law"] = max(_gap(be, f1, middle), _gap(be, f2, middle))
    ok["frobenius_law"] = _close(be, f1, middle, tol) and _close(be, f2, middle, tol)
    return res, ok


def _randomized_axioms(d: AlgebraData, tol, rng):
    m = d.structure
    n = d.dim
    mul = lambda x, y: np.einsum("kij,i,j->k", m, x, y)
    comul = lambda x: np.einsum("mpq,m->pq", np.conj(m), x)
    res = {"associativity": 0.0, "frobenius_law": 0.0}
    for _ in range(RANDOM_PROBES):
        x, y, w = (numeric.random_complex(rng, n) for _ in range(3))
        res["associativity"] = max(res["associativity"],
                                   numeric.sup_norm(mul(mul(x, y), w) - mul(x, mul(y, w))))
        # ∆(xy) = (1 ⊗ ∇)(∆x ⊗ y) = (∇ ⊗ 1)(x ⊗ ∆y)
        middle = comul(mul(x, y))
        f1 = np.einsum("pr,qrj,j->pq", comul(x), m, y)
        f2 = np.einsum("pir,i,rq->pq", m, x, comul(y))
        res["frobenius_law"] = max(res["frobenius_law"], numeric.sup_norm(f1 - middle),
                                   numeric.sup_norm(f2 - middle))
    ok = {k: v <= tol.eq_tol * max(1.0, numeric.sup_norm(m)) * n for k, v in res.items()}
    return res, ok


def check_frobenius(d: AlgebraData, tol: Tolerance = DEFAULT_TOL, rng=None) -> FrobeniusReport:
    """Evaluate associativity, unitality and the Frobenius law as concrete equalities.

    Above ``EXACT_AXIOM_DIM`` the FHilb trilinear identities are tested on
    random vectors instead of being expanded in full.
    """
    d = _data(d)
    be, m, u = d.backend, d.structure, d.unit_vec
    n = d.dim
    if n <= EXACT_AXIOM_DIM or be is REL:
        res, ok = _exact_axioms(d, tol)
        method = "exact"
    else:
        res, ok = _randomized_axioms(d, tol, np.random.default_rng(0) if rng is None else rng)
        method = "randomized"
    eye = np.eye(n, dtype=m.dtype)
    left = np.einsum("kij,i->kj", m, u)
    right = np.einsum("kij,j->ki", m, u)
    res["unitality"] = max(_gap(be, left, eye), _gap(be, right, eye))
    unital = _close(be, left, eye, tol) and _close(be, right, eye, tol)
    # comultiplication and counit are derived as daggers, so this always holds
    dagger_ok = bk.equal(bk.dagger(d.comult), d.mult, tol) and bk.equal(bk.dagger(d.counit),
                                                                        d.unit, tol)
    return FrobeniusReport(ok["associativity"], unital, ok["frobenius_law"], dagger_ok, res,
                           method)


def _pairing(d: AlgebraData) -> np.ndarray:
    """``ε ∘ ∇`` as a matrix ``[i, j]``."""
    return np.einsum("k,kij->ij", np.conj(d.unit_vec), d.structure)


def _copairing(d: AlgebraData) -> np.ndarray:
    """``∆ ∘ η`` as a matrix ``[p, q]``."""
    return np.einsum("mpq,m->pq", np.conj(d.structure), d.unit_vec)


def _symmetric(d: AlgebraData, tol) -> bool:
    form, coform = _pairing(d), _copairing(d)
    return _close(d.backend, form, form.T, tol) and _close(d.backend, coform, coform.T, tol)


def _special(d: AlgebraData, tol) -> bool:
    m = d.structure
    loop = np.einsum("kpq,mpq->km", m, np.conj(m))
    return _close(d.backend, loop, np.eye(d.dim), tol)


def _commutative(d: AlgebraData, tol) -> bool:
    m = d.structure
    return _close(d.backend, m, m.transpose(0, 2, 1), tol)


def check_symmetric(f: FrobeniusAlgebra, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Both twisted forms: ``ε∘∇∘σ = ε∘∇`` and ``σ∘∆∘η = ∆∘η``."""
    return _symmetric(_require_validated(f).data, tol)


def check_special(f: FrobeniusAlgebra, tol: Tolerance = DEFAULT_TOL) -> bool:
    return _special(_require_validated(f).data, tol)


def check_commutative(f: FrobeniusAlgebra, tol: Tolerance = DEFAULT_TOL) -> bool:
    return _commutative(_require_validated(f).data, tol)


# -- derived maps -------------------------------------------------------------

def left_mult(f, x: Morphism) -> Morphism:
    d = _data(f)
    return _out(d.backend, np.einsum("kij,i->kj", d.structure, _arr(x).ravel()))


def right_mult(f, x: Morphism) -> Morphism:
    d = _data(f)
    return _out(d.backend, np.einsum("kij,j->ki", d.structure, _arr(x).ravel()))


def multiply(f, x: Morphism, y: Morphism) -> Morphism:
    d = _data(f)
    v = np.einsum("kij,i,j->k", d.structure, _arr(x).ravel(), _arr(y).ravel())
    return _out(d.backend, v.reshape(-1, 1))


def loop_functional(f) -> Morphism:
    """``Tr_A(∇): A -> I``, sending ``x`` to the trace of left multiplication by ``x``."""
    d = _data(f)
    return _out(d.backend, np.einsum("bxb->x", d.structure).reshape(1, -1))


def action(f) -> Morphism:
    """Right action ``A -> A* ⊗ A``, i.e. ``(1 ⊗ ∇) ∘ (cup ⊗ 1)``; ``x ↦ Σ_i e_i ⊗ e_i·x``."""
    d = _data(f)
    n = d.dim
    return _out(d.backend, d.structure.transpose(1, 0, 2).reshape(n * n, n))


def coaction(f) -> Morphism:
    return bk.dagger(action(f))


def star(f, x: Morphism) -> Morphism:
    """The involution ``x* = (x† ⊗ 1) ∘ ∆ ∘ η``; conjugate transpose on matrix algebras."""
    d = _data(f)
    v = np.einsum("a,ak->k", np.conj(_arr(x).ravel()), _copairing(d))
    return _out(d.backend, v.reshape(-1, 1))


def is_central(f, z: Morphism, tol: Tolerance = DEFAULT_TOL) -> bool:
    d = _data(f)
    m, zz = d.structure, _arr(z)
    after = np.einsum("km,mij->kij", zz, m)
    left = np.einsum("kmj,mi->kij", m, zz)
    right = np.einsum("kim,mj->kij", m, zz)
    return _close(d.backend, left, after, tol) and _close(d.backend, right, after, tol)


def is_positive_relation(r: Morphism) -> bool:
    """``R = S†;S`` for some relation ``S``: symmetric, and ``x R y`` forces ``x R x``."""
    m = r.matrix
    if m.shape[0] != m.shape[1] or not np.array_equal(m, m.T):
        return False
    diag = np.diag(m)
    return bool(np.all(diag[np.any(m, axis=0)]))


def is_positive_definite(z: Morphism, tol: Tolerance = DEFAULT_TOL) -> bool:
    if z.source != z.target:
        return False
    if z.backend is FHILB:
        rep = numeric.is_psd(z.payload, tol)
        return bool(rep) and rep.min_eig >= tol.psd_tol
    m = z.matrix
    bijective = np.all(m.sum(axis=0) == 1) and np.all(m.sum(axis=1) == 1)
    return bool(bijective) and is_positive_relation(z)


def normaliser_equation_holds(f, z: Morphism, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``Tr_A(∇) ∘ z ∘ z = ε``."""
    d = _data(f)
    return bk.equal(loop_functional(d) @ z @ z, d.counit, tol)


def is_normaliser(f, z: Morphism, tol: Tolerance = DEFAULT_TOL) -> bool:
    return (is_central(f, z, tol) and is_positive_definite(z, tol)
            and normaliser_equation_holds(f, z, tol))


def check_norm_alt(f, z: Morphism, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``coaction ∘ action ∘ z ∘ z = 1_A``, the identity behind ``p ∘ p = p``."""
    d = _data(f)
    return bk.equal(coaction(d) @ action(d) @ z @ z, d.identity(), tol)


def check_frob_actions(f, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``action ∘ coaction`` equals the CPM form of ``∆`` with witness object ``A``."""
    d = _data(f)
    lhs = action(d) @ coaction(d)
    rhs = bk.superop_from_kraus(d.comult, d.dim, d.dim)
    return bk.equal(lhs, rhs, tol)


def solve_normaliser(f, tol: Tolerance = DEFAULT_TOL) -> Morphism:
    d = _data(f)
    if d.backend is FHILB:
        loop_elem = bk.dagger(loop_functional(d))
        lw = left_mult(d, loop_elem).payload
        try:
            z = bk.fhilb(numeric.psd_inv_sqrt(lw, tol))
        except (NotPSD, Singular, NotHermitian) as exc:
            raise NotNormalisable(f"loop element not positive definite: {exc}") from exc
        if not is_normaliser(d, z, tol):
            raise NotNormalisable("candidate normaliser fails centrality or the loop equation")
        return z
    n = d.dim
    candidates = [tuple(range(n))]
    if n <= RELATION_SEARCH_LIMIT:
        candidates += [p for p in itertools.permutations(range(n)) if p != candidates[0]]
    for perm in candidates:
        z = bk.rel([(i, perm[i]) for i in range(n)], n, n)
        if is_normaliser(d, z, tol):
            return z
    raise NotNormalisable("no central positive-definite relation solves the loop equation")


def validate(d: AlgebraData, tol: Tolerance = DEFAULT_TOL, normaliser: Morphism | None = None,
             pants_base: Obj | None = None) -> FrobeniusAlgebra:
    """Run every axiom check; attach a normaliser (given or solved) if one exists."""
    report = check_frobenius(d, tol)
    if not report.ok:
        failed = [k for k in ("associativity", "unitality", "frobenius_law", "dagger_ok")
                  if not getattr(report, k)]
        raise NotValidated(f"{d.name or 'algebra'} fails {', '.join(failed)}")
    if normaliser is not None:
        if not is_normaliser(d, normaliser, tol):
            raise NotNormalisable("supplied normaliser does not verify")
        z = normaliser
    else:
        try:
            z = solve_normaliser(d, tol)
        except NotNormalisable:
            z = None
    return FrobeniusAlgebra(d, report, _symmetric(d, tol), _special(d, tol),
                            _commutative(d, tol), z, pants_base)


# -- canonical constructions ---------------------------------------------------

def pants(x: Obj, tol: Tolerance = DEFAULT_TOL) -> FrobeniusAlgebra:
    """The algebra on ``X* ⊗ X`` with multiplication ``1 ⊗ cap ⊗ 1`` and unit ``cup``.

    Basis vector ``(i, j)`` multiplies like the matrix unit ``e_ij``.
    """
    a = x @ x
    i = bk.identity(x)
    mult = bk.tensor_all(i, bk.cap(x), i)
    d = AlgebraData(a, mult, bk.cup(x), f"pants({x.dim})")
    if x.backend is FHILB:
        z = bk.scale(bk.identity(a), 1 / np.sqrt(x.dim))
    else:
        z = bk.identity(a)
    return validate(d, tol, normaliser=z, pants_base=x)


def trivial_algebra(backend) -> FrobeniusAlgebra:
    one = bk.unit_object(backend)
    i = bk.identity(one)
    return validate(AlgebraData(one, i, i, "I"), normaliser=i)


def product_algebra(f: FrobeniusAlgebra, g: FrobeniusAlgebra,
                    tol: Tolerance = DEFAULT_TOL) -> FrobeniusAlgebra:
    f, g = _require_validated(f), _require_validated(g)
    bk._same_backend(f.carrier, g.carrier)
    na, nb = f.dim, g.dim
    m = np.einsum("kij,lpq->klipjq", f.structure, g.structure).reshape(na * nb, (na * nb) ** 2)
    mult = _out(f.backend, m)
    unit = bk.tensor(f.unit, g.unit)
    z = None
    if f.normaliser is not None and g.normaliser is not None:
        z = bk.tensor(f.normaliser, g.normaliser)
    d = AlgebraData(f.carrier @ g.carrier, mult, unit, f"{f.name}⊗{g.name}")
    return validate(d, tol, normaliser=z)


def dual_algebra(f: FrobeniusAlgebra, tol: Tolerance = DEFAULT_TOL) -> FrobeniusAlgebra:
    """The conjugate algebra ``(A*, ∇_*, η_*)``."""
    f = _require_validated(f)
    d = AlgebraData(f.carrier, bk.conjugate(f.mult), bk.conjugate(f.unit), f"{f.name}*")
    z = bk.conjugate(f.normaliser) if f.normaliser is not None else None
    return validate(d, tol, normaliser=z)


def rotate(d, u: np.ndarray, name: str | None = None) -> AlgebraData:
    """Transport an FHilb algebra along the unitary ``u: A -> A'``."""
    d = _data(d)
    u = numeric.as_matrix(u)
    mult = u @ d.mult.payload @ np.kron(u, u).conj().T
    return AlgebraData(d.carrier, bk.fhilb(mult), bk.fhilb(u @ d.unit.payload),
                       name if name is not None else d.name)


# -- copyable points -------------------------------------------------------------

def _copy_defect(d: AlgebraData, p: Morphism) -> float:
    return bk.distance(d.comult @ p, bk.tensor(p, p))


def _order_key(p: Morphism):
    v = np.asarray(p.matrix, dtype=complex).ravel()
    return tuple(itertools.chain.from_iterable((-round(z.real, 8), -round(z.imag, 8)) for z in v))


def copyable_points(f, tol: Tolerance = DEFAULT_TOL, rng=None) -> list:
    """All nonzero points ``p: I -> A`` with ``∆ ∘ p = p ⊗ p``.

    Points keep exactly the scale the equation forces.  The list is sorted by
    descending rounded coordinates so results are reproducible.
    """
    d = _data(f)
    if not _commutative(d, tol):
        warnings.warn(f"{d.name or 'algebra'} is not commutative; copyable points may be partial",
                      stacklevel=2)
    if d.backend is REL:
        return _copyable_rel(d)
    rng = np.random.default_rng(0) if rng is None else rng
    return sorted(_copyable_fhilb(d, tol, rng), key=_order_key)


def _copyable_rel(d: AlgebraData) -> list:
    n = d.dim
    if n > COPYABLE_SUBSET_LIMIT:
        raise ValueError(f"exhaustive copyable-point search limited to {COPYABLE_SUBSET_LIMIT}")
    cm = d.comult.matrix
    found = []
    for mask in range(1, 1 << n):
        s = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
        image = cm[:, s].any(axis=1)
        if np.array_equal(image, np.outer(s, s).ravel()):
            found.append(bk.point(REL, s))
    return sorted(found, key=_order_key)


def _copyable_fhilb(d: AlgebraData, tol: Tolerance, rng) -> list:
    n = d.dim
    m = d.structure
    cm = d.comult.payload

    def hermitian_left_mult():
        b = bk.point(FHILB, numeric.random_complex(rng, n))
        a = (b.payload + star(d, b).payload).ravel()
        return np.einsum("kij,i->kj", m, a)

    # split eigenspaces of L_a for successive random Hermitian a
    spaces = [np.eye(n, dtype=complex)]
    for _ in range(COPYABLE_RETRIES):
        if all(s.shape[1] == 1 for s in spaces):
            break
        la = hermitian_left_mult()
        refined = []
        for q in spaces:
            if q.shape[1] == 1:
                refined.append(q)
                continue
            h = q.conj().T @ la @ q
            w, v = np.linalg.eigh((h + h.conj().T) / 2)
            gap = 1e-6 * max(1.0, np.max(np.abs(w)))
            start = 0
            for k in range(1, len(w) + 1):
                if k == len(w) or w[k] - w[k - 1] > gap:
                    refined.append(q @ v[:, start:k])
                    start = k
        spaces = refined
    points = []
    for q in spaces:
        if q.shape[1] != 1:
            continue
        v = q[:, 0]
        vv = np.kron(v, v)
        lam = np.vdot(vv, cm @ v) / np.vdot(vv, vv)
        if abs(lam) < 1e-12:
            continue
        p = bk.point(FHILB, lam * v)
        if _copy_defect(d, p) <= tol.eq_tol * max(1.0, numeric.sup_norm(p.payload)) ** 2:
            points.append(p)
    return points
