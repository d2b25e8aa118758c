"""Deciding whether ``h: X* ⊗ X -> Y* ⊗ Y`` has the CPM form ``(g_* ⊗ g)`` joined by a cap.

FHilb: the Choi rearrangement of ``h`` is positive semidefinite, and a
witness ``g`` is read off its PSD factor.  Rel: the two index conditions
below hold, and ``g`` is assembled from one "square" per pair of ``h``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backends as bk
from . import numeric
from .backends import FHILB, Morphism
from .errors import ShapeMismatch
from .numeric import DEFAULT_TOL, Tolerance


@dataclass(frozen=True, eq=False)
class CPVerdict:
    """Outcome of a positivity check.

    On acceptance ``witness`` is ``g: X -> W ⊗ Y`` with ``witness_dim = dim W``
    and the recomposed CPM form has been checked against the input.  On
    rejection ``min_eig`` (FHilb) or ``failing`` (Rel) says why.
    """

    ok: bool
    method: str
    min_eig: Optional[float] = None
    witness: Optional[Morphism] = None
    witness_dim: int = 0
    failing: Optional[tuple] = None
    reason: str = ""

    def __bool__(self):
        return self.ok

    def summary(self) -> dict:
        out = {"ok": self.ok, "method": self.method}
        if self.min_eig is not None:
            out["min_eig"] = self.min_eig
        if self.ok:
            out["witness_dim"] = self.witness_dim
        if self.failing is not None:
            out["failing"] = _plain(self.failing)
        if self.reason:
            out["reason"] = self.reason
        return out


def _plain(x):
    if isinstance(x, (tuple, list)):
        return [_plain(v) for v in x]
    return x.item() if isinstance(x, np.generic) else x


def _dims(h: Morphism, x_dim: int, y_dim: int):
    if h.source.dim != x_dim * x_dim or h.target.dim != y_dim * y_dim:
        raise ShapeMismatch(f"expected a map {x_dim}*⊗{x_dim} -> {y_dim}*⊗{y_dim}, got "
                            f"{h.source.dim} -> {h.target.dim}")


def recomposition_tol(h: Morphism, tol: Tolerance, x_dim: int, y_dim: int) -> float:
    scale = max(1.0, numeric.sup_norm(h.payload))
    return max(tol.eq_tol, tol.psd_tol) * scale * x_dim * y_dim


def check_cpm(h: Morphism, x_dim: int, y_dim: int, tol: Tolerance = DEFAULT_TOL,
              method: str = "rearrange") -> CPVerdict:
    _dims(h, x_dim, y_dim)
    if h.backend is FHILB:
        return _check_fhilb(h, x_dim, y_dim, tol, method)
    return _check_rel(h, x_dim, y_dim, method)


def _check_fhilb(h, n, m, tol, method) -> CPVerdict:
    c = numeric.reshuffle(h.payload, (n, m))
    rep = numeric.is_psd(c, tol)
    if not rep:
        return CPVerdict(False, method, min_eig=rep.min_eig, reason=rep.reason)
    k = numeric.psd_factor(c, tol)
    r = k.shape[0]
    g = bk.fhilb(k.reshape(r * m, n))
    back = bk.superop_from_kraus(g, r, m)
    err = bk.distance(back, h)
    if err > recomposition_tol(h, tol, n, m):
        return CPVerdict(False, method, min_eig=rep.min_eig,
                         reason=f"witness recomposition error {err:.3g}")
    return CPVerdict(True, method, min_eig=rep.min_eig, witness=g, witness_dim=r)


def _pairs(h: Morphism, n: int, m: int) -> list:
    """``h`` as a list of ``((x', x), (y', y))`` tuples."""
    out = []
    for s, t in h.payload.sorted_pairs():
        out.append(((s // n, s % n), (t // m, t % m)))
    return out


def rel_cpm_violation(h: Morphism, n: int, m: int) -> Optional[tuple]:
    """First pair breaking ``(x',x)R(y',y) ⇔ (x,x')R(y,y')`` or ``⇒ (x,x)R(y,y)``."""
    have = set(h.payload.pairs)
    for (xp, x), (yp, y) in _pairs(h, n, m):
        if (x * n + xp, y * m + yp) not in have:
            return ((xp, x), (yp, y), "swap")
        if (x * n + x, y * m + y) not in have:
            return ((xp, x), (yp, y), "diagonal")
    return None


def _check_rel(h, n, m, method) -> CPVerdict:
    bad = rel_cpm_violation(h, n, m)
    if bad is not None:
        return CPVerdict(False, method, failing=bad,
                         reason=f"{bad[2]} condition fails at {bad[0]} -> {bad[1]}")
    squares = _pairs(h, n, m)
    w = max(1, len(squares))
    g = []
    for idx, ((xp, x), (yp, y)) in enumerate(squares):
        g.append((xp, idx * m + yp))
        g.append((x, idx * m + y))
    g = bk.rel(g, n, w * m)
    back = bk.superop_from_kraus(g, w, m)
    if not bk.equal(back, h):
        return CPVerdict(False, method, reason="witness recomposition failed")
    return CPVerdict(True, method, witness=g, witness_dim=w)


def largest_cpm_subrelation(h: Morphism, n: int, m: int) -> Morphism:
    """Union of all squares ``G × G`` (``G`` a two-element relation) contained in ``h``."""
    have = set(h.payload.pairs)
    keep = set()
    for (xp, x), (yp, y) in _pairs(h, n, m):
        square = [(xp * n + xp, yp * m + yp), (xp * n + x, yp * m + y),
                  (x * n + xp, y * m + yp), (x * n + x, y * m + y)]
        if all(p in have for p in square):
            keep.update(square)
    return bk.rel(keep, n * n, m * m)


def positive_part(h: Morphism, n: int, m: int) -> np.ndarray:
    """Un-rearranged projection of the Choi matrix onto the PSD cone (Hermitian part, clipped)."""
    c = numeric.reshuffle(h.payload, (n, m))
    c = (c + c.conj().T) / 2
    w, v = np.linalg.eigh(c)
    cp = (v * np.clip(w, 0, None)) @ v.conj().T
    return numeric.unreshuffle(cp, (n, m))
