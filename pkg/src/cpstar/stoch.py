"""Classical fragment: commutative objects, stochastic matrices, POVMs and the Born rule.

Copyable points ``x_i`` of a commutative FHilb algebra are orthogonal but not
unit vectors in general; ``Σ_i z² x_i`` is the unit (``z`` the normaliser),
which reduces to ``Σ_i x_i = η`` when the algebra is special.  POVM elements
are taken as ``P† ∘ z² ∘ x_i`` so that completeness holds in both cases.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backends as bk
from . import cpstar as cs
from . import frobenius as fr
from . import numeric
from .backends import FHILB, Morphism
from .errors import (BackendMismatch, CompletenessFailure, CertificateFailure, NotCommutative,
                     NotNormalised, NotStochastic, ShapeMismatch)
from .numeric import DEFAULT_TOL, Tolerance


@dataclass(frozen=True, eq=False)
class StochObject:
    obj: cs.CPStarObject
    points: tuple

    dim = property(lambda self: self.obj.dim)

    def point_matrix(self) -> np.ndarray:
        """Copyable points as columns."""
        return np.concatenate([p.payload for p in self.points], axis=1)


def stoch_object(a, tol: Tolerance = DEFAULT_TOL) -> StochObject:
    if isinstance(a, StochObject):
        return a
    a = cs.as_object(a)
    if a.backend is not FHILB:
        raise BackendMismatch("the classical fragment is implemented for FHilb")
    if not a.algebra.commutative:
        raise NotCommutative(f"{a.name or 'algebra'} is not commutative")
    pts = tuple(fr.copyable_points(a.algebra, tol))
    if len(pts) != a.dim:
        raise NotCommutative(f"found {len(pts)} copyable points for dimension {a.dim}")
    z2 = a.normaliser @ a.normaliser
    total = bk.zero(bk.unit_object(FHILB), a.carrier)
    for p in pts:
        total = bk.add(total, z2 @ p)
    if not bk.equal(total, a.algebra.unit, tol):
        raise NotCommutative("z²-weighted copyable points do not sum to the unit")
    return StochObject(a, pts)


def _coefficients(b: StochObject, v: np.ndarray) -> np.ndarray:
    """Coordinates of ``v`` in the orthogonal basis of copyable points."""
    q = b.point_matrix()
    return (q.conj().T @ v) / np.sum(np.abs(q) ** 2, axis=0)[:, None]


def to_stochastic_matrix(f: Morphism, a, b, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``S[j, i]`` is the weight of point ``y_j`` in ``f(x_i)``; checked column-stochastic."""
    a, b = stoch_object(a, tol), stoch_object(b, tol)
    if not cs.is_normalised(f, a.obj, b.obj, tol):
        raise NotNormalised("f does not preserve counits")
    if not cs.check_cpstar(f, a.obj, b.obj, tol).ok:
        raise CertificateFailure("f is not a CP* morphism")
    s = _coefficients(b, f.payload @ a.point_matrix())
    recon = b.point_matrix() @ s
    if numeric.sup_norm(recon - f.payload @ a.point_matrix()) > tol.eq_tol * max(
            1.0, numeric.sup_norm(f.payload)) * b.dim:
        raise NotStochastic("image of a point leaves the span of copyable points")
    if numeric.sup_norm(s.imag) > tol.eq_tol * b.dim:
        raise NotStochastic("complex transition weights")
    s = s.real
    check_stochastic(s, tol)
    return s


def check_stochastic(s, tol: Tolerance = DEFAULT_TOL) -> None:
    s = np.asarray(s)
    if s.ndim != 2 or not np.all(np.isfinite(s)):
        raise NotStochastic("expected a finite 2-d array")
    if np.iscomplexobj(s) and numeric.sup_norm(np.imag(s)) > tol.eq_tol:
        raise NotStochastic("entries must be real")
    s = np.real(s)
    if s.min(initial=0.0) < -tol.eq_tol:
        raise NotStochastic(f"negative entry {s.min():.3g}")
    cols = s.sum(axis=0)
    if numeric.sup_norm(cols - 1) > tol.eq_tol * max(1, s.shape[0]):
        raise NotStochastic(f"column sums {cols.tolist()} differ from 1")


def from_stochastic_matrix(s, a, b, tol: Tolerance = DEFAULT_TOL) -> cs.CPStarMorphism:
    """``f = Σ_ji S[j, i] · y_j ⟨x_i, -⟩ / ‖x_i‖²``, certified and checked normalised."""
    a, b = stoch_object(a, tol), stoch_object(b, tol)
    s = np.asarray(s, dtype=float)
    if s.shape != (b.dim, a.dim):
        raise ShapeMismatch(f"stochastic matrix must be {b.dim}x{a.dim}")
    check_stochastic(s, tol)
    x = a.point_matrix()
    dual = x.conj().T / np.sum(np.abs(x) ** 2, axis=0)[:, None]
    f = bk.fhilb(b.point_matrix() @ s @ dual)
    out = cs.certify(f, a.obj, b.obj, tol)
    if not cs.is_normalised(f, a.obj, b.obj, tol):
        raise NotNormalised("constructed map does not preserve counits")
    return out


# -- measurements ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class POVM:
    elements: tuple
    base_dim: int

    def operators(self) -> list:
        """Elements as ``n x n`` matrices through the pants identification ``(i, j) ↔ e_ij``."""
        n = self.base_dim
        return [e.payload.reshape(n, n) for e in self.elements]

    def completeness_defect(self) -> float:
        return numeric.sup_norm(sum(self.operators()) - np.eye(self.base_dim))


@dataclass(frozen=True)
class Distribution:
    weights: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < -DEFAULT_TOL.eq_tol) or abs(w.sum() - 1) > 1e-9 * max(1, len(w)):
            raise NotStochastic(f"not a probability distribution: {w.tolist()}")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)


def _pants_dim(x) -> int:
    return x.dim if hasattr(x, "dim") else int(x)


def _measurement(p: Morphism, x, a, tol):
    from . import cpm

    n = _pants_dim(x)
    src = cpm.embed_object(n)
    a = stoch_object(a, tol)
    if p.source != src.carrier or p.target != a.obj.carrier:
        raise ShapeMismatch("measurement must map the pants object into A")
    if not cs.is_normalised(p, src, a.obj, tol):
        raise NotNormalised("measurement does not preserve counits")
    if not cs.check_cpstar(p, src, a.obj, tol).ok:
        raise CertificateFailure("measurement is not CP*")
    return n, src, a


def extract_povm(p: Morphism, x, a, tol: Tolerance = DEFAULT_TOL) -> POVM:
    n, src, a = _measurement(p, x, a, tol)
    z2 = a.obj.normaliser @ a.obj.normaliser
    elems = tuple(bk.dagger(p) @ z2 @ xi for xi in a.points)
    for e in elems:
        if not cs.is_positive_element(e, src, tol).ok:
            raise CertificateFailure("POVM element is not positive")
    povm = POVM(elems, n)
    total = bk.zero(bk.unit_object(FHILB), src.carrier)
    for e in elems:
        total = bk.add(total, e)
    if not bk.equal(total, bk.cup(bk.Obj(FHILB, n)), tol):
        raise CompletenessFailure(f"Σ E_i deviates from the identity by "
                                  f"{povm.completeness_defect():.3g}")
    return povm


def born(p: Morphism, rho: Morphism, x, a, tol: Tolerance = DEFAULT_TOL) -> Distribution:
    """Weights of ``P ∘ ρ`` on the copyable points, cross-checked against ``Tr(E_i ρ)``."""
    n, src, a = _measurement(p, x, a, tol)
    if not cs.is_positive_element(rho, src, tol).ok:
        raise CertificateFailure("ρ is not a positive element")
    if not cs.is_normalised(rho, cs.trivial_object(FHILB), src, tol):
        raise NotNormalised("ρ does not have unit trace")
    w = _coefficients(a, (p @ rho).payload).ravel()
    povm = extract_povm(p, x, a, tol)
    r = rho.payload.reshape(n, n)
    oracle = np.array([np.trace(e @ r) for e in povm.operators()])
    if numeric.sup_norm(w - oracle) > tol.eq_tol * max(1, len(w)):
        raise CompletenessFailure("Born weights disagree with Tr(E_i ρ)")
    return Distribution(tuple(float(v) for v in w.real))


def prepare(e: Morphism, d: Distribution, a, x, tol: Tolerance = DEFAULT_TOL) -> cs.PositiveElement:
    """``E ∘ Σ d_i x_i`` as a certified, normalised positive element of the pants object."""
    from . import cpm

    a = stoch_object(a, tol)
    tgt = cpm.embed_object(_pants_dim(x))
    if not cs.is_normalised(e, a.obj, tgt, tol):
        raise NotNormalised("preparation does not preserve counits")
    if not cs.check_cpstar(e, a.obj, tgt, tol).ok:
        raise CertificateFailure("preparation is not CP*")
    w = d.as_array()
    if len(w) != a.dim:
        raise ShapeMismatch("distribution length differs from the number of points")
    mix = a.point_matrix() @ w.reshape(-1, 1)
    state = e @ bk.fhilb(mix)
    out = cs.positive_element(state, tgt, tol)
    if not cs.is_normalised(state, cs.trivial_object(FHILB), tgt, tol):
        raise NotNormalised("prepared state does not have unit trace")
    return out
