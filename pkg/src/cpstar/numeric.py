"""Dense complex linear algebra with an explicit tolerance policy.

Everything the FHilb backend computes goes through here.  Composite indices
are row-major with the left tensor factor most significant, so
``kron(a, b)[i * rows(b) + k, j * cols(b) + l] == a[i, j] * b[k, l]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotPSD, ShapeMismatch, Singular

DEFAULT_EQ_TOL = 1e-9
DEFAULT_PSD_TOL = 1e-9


@dataclass(frozen=True)
class Tolerance:
    eq_tol: float = DEFAULT_EQ_TOL
    psd_tol: float = DEFAULT_PSD_TOL

    def __post_init__(self):
        for name in ("eq_tol", "psd_tol"):
            v = getattr(self, name)
            if not (0 < v <= 1e-3):
                raise ValueError(f"{name} must lie in (0, 1e-3], got {v}")

    @classmethod
    def uniform(cls, tol: float) -> "Tolerance":
        return cls(tol, tol)


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d complex array, rejecting NaN/Inf."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def conjugate(a) -> np.ndarray:
    return as_matrix(a).conj()


def sup_norm(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermitian_defect(a) -> float:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return float("inf")
    return sup_norm(a - a.conj().T)


def eig_hermitian(a, tol: Tolerance = DEFAULT_TOL):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    a = as_matrix(a)
    if hermitian_defect(a) > tol.eq_tol * max(1.0, sup_norm(a)):
        raise NotHermitian(f"‖a − a†‖∞ = {hermitian_defect(a):.3g}")
    h = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(h)
    return w, v


@dataclass(frozen=True)
class PSDReport:
    ok: bool
    min_eig: float
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_psd(a, tol: Tolerance = DEFAULT_TOL) -> PSDReport:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"is_psd needs a square matrix, got {a.shape}")
    if a.size == 0:
        return PSDReport(True, 0.0)
    defect = hermitian_defect(a)
    if defect > tol.eq_tol * max(1.0, sup_norm(a)):
        return PSDReport(False, float("nan"), f"not Hermitian (defect {defect:.3g})")
    w, _ = eig_hermitian(a, tol)
    lo = float(w[0])
    if lo < -tol.psd_tol * max(1.0, sup_norm(a)):
        return PSDReport(False, lo, f"negative eigenvalue {lo:.6g}")
    return PSDReport(True, lo)


def psd_factor(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Return ``h`` with ``h† h == a``; rows of ``h`` = numerical rank of ``a`` (at least one)."""
    a = as_matrix(a)
    rep = is_psd(a, tol)
    if not rep:
        raise NotPSD(rep.reason)
    w, v = eig_hermitian(a, tol)
    keep = w > tol.psd_tol * max(1.0, sup_norm(a))
    if not keep.any():
        return np.zeros((1, a.shape[0]), dtype=complex)
    return np.sqrt(w[keep])[:, None] * v[:, keep].conj().T


def psd_inv_sqrt(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Unique PSD ``s`` with ``s a s == I`` for positive-definite ``a``."""
    a = as_matrix(a)
    rep = is_psd(a, tol)
    if not rep:
        raise NotPSD(rep.reason)
    w, v = eig_hermitian(a, tol)
    if w[0] < tol.psd_tol:
        raise Singular(f"minimum eigenvalue {w[0]:.3g} below psd_tol")
    return (v / np.sqrt(w)) @ v.conj().T


def psd_sqrt(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    a = as_matrix(a)
    rep = is_psd(a, tol)
    if not rep:
        raise NotPSD(rep.reason)
    w, v = eig_hermitian(a, tol)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def reshuffle(h, dims) -> np.ndarray:
    """Choi rearrangement of a superoperator ``h: A*⊗A -> B*⊗B``.

    ``dims = (n, m)`` with ``n = dim A`` and ``m = dim B``; returns ``C`` with
    ``C[(b', a'), (b, a)] = h[(b', b), (a', a)]``.
    """
    n, m = dims
    h = as_matrix(h)
    if h.shape != (m * m, n * n):
        raise ShapeMismatch(f"reshuffle expects shape {(m * m, n * n)}, got {h.shape}")
    return h.reshape(m, m, n, n).transpose(0, 2, 1, 3).reshape(m * n, m * n)


def unreshuffle(c, dims) -> np.ndarray:
    """Inverse of :func:`reshuffle` for the same ``dims``."""
    n, m = dims
    c = as_matrix(c)
    if c.shape != (m * n, m * n):
        raise ShapeMismatch(f"unreshuffle expects shape {(m * n, m * n)}, got {c.shape}")
    return c.reshape(m, n, m, n).transpose(0, 2, 1, 3).reshape(m * m, n * n)


def null_space(a, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``a``."""
    a = as_matrix(a)
    if a.shape[0] == 0:
        return np.eye(a.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(a)
    scale = max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > rtol * scale))
    return vh[rank:].conj().T


def numerical_rank(a, tol: float = 1e-9) -> int:
    s = np.linalg.svd(as_matrix(a), compute_uv=False)
    if not s.size:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
