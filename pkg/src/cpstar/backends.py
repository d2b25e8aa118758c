"""The two dagger compact models: FHilb (complex matrices) and Rel (finite relations).

A :class:`Morphism` carries a backend-tagged payload between finite objects.
FHilb payloads are ``target.dim x source.dim`` complex arrays.  Rel payloads
are :class:`Relation` values, a canonical set of ``(source, target)`` index
pairs.  Tensor products use row-major composite indices with the left factor
most significant in both backends, and the dual ``A*`` shares the index set
of ``A``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

from . import numeric
from .errors import BackendMismatch, ShapeMismatch
from .numeric import DEFAULT_TOL, Tolerance


class Backend(str, Enum):
    FHILB = "fhilb"
    REL = "rel"


FHILB = Backend.FHILB
REL = Backend.REL


@dataclass(frozen=True)
class Obj:
    backend: Backend
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "backend", Backend(self.backend))
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"objects must be positive-dimensional, got dim={self.dim}")
        object.__setattr__(self, "dim", int(self.dim))

    def __matmul__(self, other: "Obj") -> "Obj":
        _same_backend(self, other)
        return Obj(self.backend, self.dim * other.dim)


def unit_object(backend: Backend) -> Obj:
    return Obj(backend, 1)


@dataclass(frozen=True)
class Relation:
    source_size: int
    target_size: int
    pairs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        pairs = frozenset((int(s), int(t)) for s, t in self.pairs)
        for s, t in pairs:
            if not (0 <= s < self.source_size and 0 <= t < self.target_size):
                raise ShapeMismatch(f"pair {(s, t)} out of range "
                                    f"{self.source_size}x{self.target_size}")
        object.__setattr__(self, "pairs", pairs)
        mat = np.zeros((self.target_size, self.source_size), dtype=bool)
        for s, t in pairs:
            mat[t, s] = True
        mat.setflags(write=False)
        object.__setattr__(self, "_bool", mat)

    @classmethod
    def from_bool(cls, mat) -> "Relation":
        """Build from a boolean matrix indexed ``[target, source]``."""
        mat = np.asarray(mat, dtype=bool)
        t, s = np.nonzero(mat)
        return cls(mat.shape[1], mat.shape[0], frozenset(zip(s.tolist(), t.tolist())))

    def to_bool(self) -> np.ndarray:
        return self._bool

    def sorted_pairs(self) -> list:
        return sorted(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        return tuple(pair) in self.pairs


Payload = Union[np.ndarray, Relation]


@dataclass(frozen=True, eq=False)
class Morphism:
    source: Obj
    target: Obj
    payload: Payload

    def __post_init__(self):
        _same_backend(self.source, self.target)
        if self.source.backend is FHILB:
            if isinstance(self.payload, Relation):
                raise BackendMismatch("FHilb morphism given a relation payload")
            m = numeric.as_matrix(self.payload)
            if m.shape != (self.target.dim, self.source.dim):
                raise ShapeMismatch(f"payload shape {m.shape} does not match "
                                    f"{self.target.dim}x{self.source.dim}")
            m = m.copy()
            m.setflags(write=False)
            object.__setattr__(self, "payload", m)
        else:
            if not isinstance(self.payload, Relation):
                raise BackendMismatch("Rel morphism needs a Relation payload")
            if (self.payload.source_size, self.payload.target_size) != (self.source.dim,
                                                                        self.target.dim):
                raise ShapeMismatch("relation sizes do not match endpoints")

    @property
    def backend(self) -> Backend:
        return self.source.backend

    @property
    def matrix(self) -> np.ndarray:
        """Complex matrix (FHilb) or boolean matrix ``[target, source]`` (Rel)."""
        if self.backend is FHILB:
            return self.payload
        return self.payload.to_bool()

    def __matmul__(self, other: "Morphism") -> "Morphism":
        return compose(self, other)

    def __repr__(self):
        return f"Morphism({self.backend.value}: {self.source.dim} -> {self.target.dim})"


# -- constructors -----------------------------------------------------------

def fhilb(matrix, source: int | None = None, target: int | None = None) -> Morphism:
    m = numeric.as_matrix(matrix)
    s = m.shape[1] if source is None else source
    t = m.shape[0] if target is None else target
    return Morphism(Obj(FHILB, s), Obj(FHILB, t), m)


def rel(pairs: Iterable, source: int, target: int) -> Morphism:
    return Morphism(Obj(REL, source), Obj(REL, target), Relation(source, target, frozenset(pairs)))


def rel_from_bool(mat) -> Morphism:
    r = Relation.from_bool(mat)
    return Morphism(Obj(REL, r.source_size), Obj(REL, r.target_size), r)


def from_matrix(backend: Backend, mat) -> Morphism:
    """Morphism from a ``[target, source]`` matrix in either backend."""
    if Backend(backend) is FHILB:
        return fhilb(mat)
    return rel_from_bool(np.asarray(mat) != 0)


def identity(a: Obj) -> Morphism:
    return from_matrix(a.backend, np.eye(a.dim))


def zero(a: Obj, b: Obj) -> Morphism:
    _same_backend(a, b)
    return from_matrix(a.backend, np.zeros((b.dim, a.dim)))


def point(backend: Backend, coeffs) -> Morphism:
    """A morphism ``I -> A`` from a coefficient list (Rel: nonzero = member)."""
    v = np.asarray(coeffs).reshape(-1, 1)
    return from_matrix(backend, v)


# -- structure ---------------------------------------------------------------

def _same_backend(*things):
    tags = {t.backend for t in things}
    if len(tags) != 1:
        raise BackendMismatch(f"mixed backends: {sorted(t.value for t in tags)}")


def _bool_compose(g: np.ndarray, f: np.ndarray) -> np.ndarray:
    return (g.astype(np.int64) @ f.astype(np.int64)) > 0


def compose(g: Morphism, f: Morphism) -> Morphism:
    """``g ∘ f``."""
    _same_backend(g, f)
    if f.target != g.source:
        raise ShapeMismatch(f"cannot compose: f targets {f.target.dim}, g expects {g.source.dim}")
    if f.backend is FHILB:
        return Morphism(f.source, g.target, g.payload @ f.payload)
    return Morphism(f.source, g.target,
                    Relation.from_bool(_bool_compose(g.matrix, f.matrix)))


def compose_all(*ms: Morphism) -> Morphism:
    """``ms[0] ∘ ms[1] ∘ ... ∘ ms[-1]``."""
    return reduce(compose, ms)


def tensor(f: Morphism, g: Morphism) -> Morphism:
    _same_backend(f, g)
    if f.backend is FHILB:
        m = np.kron(f.payload, g.payload)
    else:
        m = np.kron(f.matrix.astype(np.int64), g.matrix.astype(np.int64)) > 0
        m = Relation.from_bool(m)
    return Morphism(f.source @ g.source, f.target @ g.target, m)


def tensor_all(*ms: Morphism) -> Morphism:
    return reduce(tensor, ms)


def dagger(f: Morphism) -> Morphism:
    if f.backend is FHILB:
        return Morphism(f.target, f.source, f.payload.conj().T)
    return Morphism(f.target, f.source, Relation.from_bool(f.matrix.T))


def conjugate(f: Morphism) -> Morphism:
    """The lower-star ``f_*: A* -> B*``; entrywise conjugate, identity in Rel."""
    if f.backend is FHILB:
        return Morphism(f.source, f.target, f.payload.conj())
    return f


def transpose(f: Morphism) -> Morphism:
    """The upper-star ``f^*: B* -> A*`` obtained by bending wires with cups and caps."""
    return dagger(conjugate(f))


def add(f: Morphism, g: Morphism) -> Morphism:
    """Sum of parallel morphisms (union in Rel)."""
    _same_backend(f, g)
    if (f.source, f.target) != (g.source, g.target):
        raise ShapeMismatch("can only add parallel morphisms")
    if f.backend is FHILB:
        return Morphism(f.source, f.target, f.payload + g.payload)
    return Morphism(f.source, f.target, Relation.from_bool(f.matrix | g.matrix))


def scale(f: Morphism, c: complex) -> Morphism:
    if f.backend is not FHILB:
        raise BackendMismatch("scalar multiplication by a number is FHilb-only")
    return Morphism(f.source, f.target, c * f.payload)


def cup(a: Obj) -> Morphism:
    """``I -> A* ⊗ A``, the vector ``Σ_i e_i ⊗ e_i``."""
    return from_matrix(a.backend, np.eye(a.dim).reshape(-1, 1))


def cap(a: Obj) -> Morphism:
    """``A ⊗ A* -> I``."""
    return dagger(cup(a))


def permutation_indices(dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """For each output composite index, the input composite index it reads."""
    total = int(np.prod(dims))
    return np.arange(total).reshape(tuple(dims)).transpose(tuple(perm)).ravel()


def permute(backend: Backend, dims: Sequence[int], perm: Sequence[int]) -> Morphism:
    """Wire permutation ``⊗_k dims[k] -> ⊗_k dims[perm[k]]``."""
    idx = permutation_indices(dims, perm)
    total = idx.size
    m = np.zeros((total, total))
    m[np.arange(total), idx] = 1
    return from_matrix(backend, m)


def swap(a: Obj, b: Obj) -> Morphism:
    _same_backend(a, b)
    return permute(a.backend, [a.dim, b.dim], [1, 0])


def equal(f: Morphism, g: Morphism, tol: Tolerance = DEFAULT_TOL) -> bool:
    _same_backend(f, g)
    if (f.source, f.target) != (g.source, g.target):
        raise ShapeMismatch("equal() needs parallel morphisms")
    if f.backend is FHILB:
        scale_ = max(1.0, numeric.sup_norm(f.payload), numeric.sup_norm(g.payload))
        return numeric.sup_norm(f.payload - g.payload) <= tol.eq_tol * scale_
    return f.payload.pairs == g.payload.pairs


def distance(f: Morphism, g: Morphism) -> float:
    """Sup-norm distance (FHilb) or size of the symmetric difference (Rel)."""
    if f.backend is FHILB:
        return numeric.sup_norm(f.payload - g.payload)
    return float(len(f.payload.pairs ^ g.payload.pairs))


def is_zero(f: Morphism, tol: Tolerance = DEFAULT_TOL) -> bool:
    if f.backend is FHILB:
        return numeric.sup_norm(f.payload) <= tol.eq_tol
    return not f.payload.pairs


def basis_point(a: Obj, i: int) -> Morphism:
    v = np.zeros(a.dim)
    v[i] = 1
    return point(a.backend, v)


def superop_from_kraus(g: Morphism, x_dim: int, b_dim: int) -> Morphism:
    """The CPM-form map ``A* ⊗ A -> B* ⊗ B`` of ``g: A -> X ⊗ B``.

    Entrywise ``K[(b', b), (a', a)] = Σ_x conj(g[(x, b'), a']) g[(x, b), a]``:
    ``g_* ⊗ g`` with the two ``X`` legs joined by a cap.
    """
    if g.target.dim != x_dim * b_dim:
        raise ShapeMismatch(f"g must target X ⊗ B of dim {x_dim * b_dim}")
    a = g.source.dim
    t = g.payload if g.backend is FHILB else g.matrix.astype(np.int64)
    t = t.reshape(x_dim, b_dim, a)
    k = np.einsum("xpa,xqc->pqac", t.conj(), t).reshape(b_dim * b_dim, a * a)
    return from_matrix(g.backend, k)
