"""Structure theory: matrix-block decomposition in FHilb and groupoids in Rel.

These give concrete, independent oracles for the abstract checkers in
:mod:`cpstar.cpstar`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import backends as bk
from . import frobenius as fr
from . import numeric
from .backends import FHILB, REL, Morphism, Obj
from .errors import BackendMismatch, NonIntegralFactor, NotAGroupoid, ShapeMismatch
from .numeric import DEFAULT_TOL, Tolerance

INTEGRALITY_TOL = 1e-6
SPLIT_RETRIES = 8


# -- block (direct-sum) algebras ------------------------------------------------

def block_offsets(dims: Sequence[int]) -> list:
    out, acc = [], 0
    for n in dims:
        out.append(acc)
        acc += n * n
    return out


def block_structure(dims: Sequence[int], weights: Sequence[float] | None = None) -> np.ndarray:
    """Structure constants of ``⊕ M_{n_k}`` in the basis of (rescaled) matrix units.

    Block ``k`` carries the inner product ``c_k · Tr(a† b)``, so its
    orthonormal basis is ``e_ij / √c_k``.  With unit weights this is the
    plain matrix-unit basis.
    """
    weights = [1.0] * len(dims) if weights is None else list(weights)
    total = sum(n * n for n in dims)
    m = np.zeros((total, total, total), dtype=complex)
    for n, off, c in zip(dims, block_offsets(dims), weights):
        s = 1 / np.sqrt(c)
        for i, j, l in itertools.product(range(n), repeat=3):
            m[off + i * n + l, off + i * n + j, off + j * n + l] = s
    return m


def block_algebra(dims: Sequence[int], weights: Sequence[float] | None = None,
                  name: str | None = None) -> fr.AlgebraData:
    weights = [1.0] * len(dims) if weights is None else list(weights)
    if any(c <= 0 for c in weights):
        raise ValueError("block weights must be positive")
    total = sum(n * n for n in dims)
    m = block_structure(dims, weights).reshape(total, total * total)
    u = np.zeros(total, dtype=complex)
    for n, off, c in zip(dims, block_offsets(dims), weights):
        for i in range(n):
            u[off + i * n + i] = np.sqrt(c)
    label = name or "⊕".join(f"M{n}" for n in dims)
    obj = Obj(FHILB, total)
    return fr.AlgebraData(obj, bk.fhilb(m), bk.fhilb(u.reshape(-1, 1)), label)


# -- centre and Wedderburn ---------------------------------------------------------

def center(f, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the centre: ``ker`` of the stacked ``c ↦ c·e_b − e_b·c``."""
    d = fr._data(f)
    if d.backend is not FHILB:
        raise BackendMismatch("center is computed for FHilb algebras")
    m = d.structure
    stacked = np.concatenate([m[:, :, b] - m[:, b, :] for b in range(d.dim)], axis=0)
    return numeric.null_space(stacked, rtol=max(tol.eq_tol, 1e-10))


@dataclass(frozen=True, eq=False)
class FactorDecomposition:
    """``A ≅ ⊕ M_{n_k}``.

    ``basis`` has the matrix units ``e^{(k)}_ij`` of ``A`` as columns, in the
    block coordinate order (blocks ascending by size, entries row-major);
    ``iso`` is its inverse, taking ``A`` to those coordinates.  ``weights`` are
    the squared norms ``‖e^{(k)}_11‖²``.
    """

    factor_dims: tuple
    basis: np.ndarray
    iso: Morphism
    central_idempotents: tuple
    weights: tuple

    @property
    def offsets(self) -> list:
        return block_offsets(self.factor_dims)

    @property
    def total_dim(self) -> int:
        return sum(n * n for n in self.factor_dims)

    def to_blocks(self, x) -> list:
        """Coordinates of an element of ``A`` as a list of square matrices."""
        v = self.iso.payload @ np.asarray(x.payload if isinstance(x, Morphism) else x).reshape(-1)
        return [v[o:o + n * n].reshape(n, n) for n, o in zip(self.factor_dims, self.offsets)]

    def from_blocks(self, blocks) -> np.ndarray:
        v = np.concatenate([np.asarray(b, dtype=complex).reshape(-1) for b in blocks])
        return self.basis @ v


def _eigen_groups(w: np.ndarray, gap: float) -> list:
    groups, start = [], 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > gap:
            groups.append((start, k))
            start = k
    return groups


def _hermitian_element(d, rng, space: np.ndarray | None = None) -> np.ndarray:
    """A random self-adjoint element, optionally drawn from the span of ``space``'s columns."""
    if space is None:
        b = numeric.random_complex(rng, d.dim)
    else:
        b = space @ numeric.random_complex(rng, space.shape[1])
    bp = bk.point(FHILB, b)
    return (bp.payload + fr.star(d, bp).payload).ravel()


def _lmul(d, x: np.ndarray) -> np.ndarray:
    return np.einsum("kij,i->kj", d.structure, x)


def _mul(d, x, y) -> np.ndarray:
    return np.einsum("kij,i,j->k", d.structure, x, y)


def _star(d, x) -> np.ndarray:
    return fr.star(d, bk.point(FHILB, x)).payload.ravel()


def _central_idempotents(d, tol, rng):
    z = center(d, tol)
    u = d.unit_vec
    for _ in range(SPLIT_RETRIES):
        h = _hermitian_element(d, rng, z)
        w, v = np.linalg.eigh((_lmul(d, h) + _lmul(d, h).conj().T) / 2)
        groups = _eigen_groups(w, 1e-6 * max(1.0, np.max(np.abs(w))))
        if len(groups) == z.shape[1]:
            out = []
            for a, b in groups:
                q = v[:, a:b]
                out.append((q @ (q.conj().T @ u), q))
            return out
    raise NonIntegralFactor("could not separate the centre into minimal idempotents")


def _matrix_units(d, n: int, p: np.ndarray, space: np.ndarray, tol, rng) -> np.ndarray:
    """Columns ``e_ij`` (row-major) for the factor with unit ``p`` spanning ``space``."""
    if n == 1:
        return p.reshape(-1, 1)
    for _ in range(SPLIT_RETRIES):
        h = _hermitian_element(d, rng, space)
        lh = space.conj().T @ _lmul(d, h) @ space
        w, v = np.linalg.eigh((lh + lh.conj().T) / 2)
        groups = _eigen_groups(w, 1e-6 * max(1.0, np.max(np.abs(w))))
        if len(groups) == n and all(b - a == n for a, b in groups):
            break
    else:
        raise NonIntegralFactor("failed to split a factor into rank-one projections")
    diag = []
    for a, b in groups:
        proj = space @ v[:, a:b]
        diag.append(proj @ (proj.conj().T @ p))
    units = {(i, i): diag[i] for i in range(n)}
    for j in range(1, n):
        for _ in range(SPLIT_RETRIES):
            r = space @ numeric.random_complex(rng, space.shape[1])
            x = _mul(d, _mul(d, diag[0], r), diag[j])
            xx = _mul(d, x, _star(d, x))
            c = np.vdot(diag[0], xx) / np.vdot(diag[0], diag[0])
            if c.real > 1e-6:
                units[(0, j)] = x / np.sqrt(c.real)
                break
        else:
            raise NonIntegralFactor("could not build off-diagonal matrix units")
        units[(j, 0)] = _star(d, units[(0, j)])
    for i in range(1, n):
        for j in range(1, n):
            if i != j:
                units[(i, j)] = _mul(d, units[(i, 0)], units[(0, j)])
    return np.stack([units[(i, j)] for i in range(n) for j in range(n)], axis=1)


def wedderburn(f, tol: Tolerance = DEFAULT_TOL, rng=None) -> FactorDecomposition:
    """Decompose a dagger Frobenius algebra in FHilb as ``⊕ M_{n_k}``.

    Central idempotents come from the spectral projectors of ``L_h`` for a
    random self-adjoint central ``h``; within each factor a random self-adjoint
    element yields the diagonal matrix units and the off-diagonal ones are
    normalised so that ``e_1j e_1j* = e_11``.
    """
    d = fr._data(f)
    if d.backend is not FHILB:
        raise BackendMismatch("wedderburn needs an FHilb algebra")
    rng = np.random.default_rng(0) if rng is None else rng
    blocks = []
    for p, space in _central_idempotents(d, tol, rng):
        r = space.shape[1]
        root = np.sqrt(r)
        if abs(root - round(root)) > INTEGRALITY_TOL:
            raise NonIntegralFactor(f"block of dimension {r} is not a perfect square")
        blocks.append((int(round(root)), p, space))
    blocks.sort(key=lambda t: t[0])
    cols, idems, weights = [], [], []
    for n, p, space in blocks:
        units = _matrix_units(d, n, p, space, tol, rng)
        cols.append(units)
        idems.append(bk.point(FHILB, p))
        weights.append(float(np.vdot(units[:, 0], units[:, 0]).real))
    basis = np.concatenate(cols, axis=1)
    dims = tuple(n for n, _, _ in blocks)
    iso = bk.fhilb(np.linalg.inv(basis))
    dec = FactorDecomposition(dims, basis, iso, tuple(idems), tuple(weights))
    if not intertwines(d, dec, tol):
        raise NonIntegralFactor("block isomorphism fails to intertwine the multiplications")
    return dec


def intertwines(f, dec: FactorDecomposition, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``iso ∘ ∇_A ∘ (T ⊗ T) = ∇_std`` and ``iso(η) = Σ 1_{n_k}``."""
    d = fr._data(f)
    t, ti = dec.basis, dec.iso.payload
    got = np.einsum("ak,kij,ib,jc->abc", ti, d.structure, t, t)
    want = block_structure(dec.factor_dims)
    unit = ti @ d.unit_vec
    want_unit = np.concatenate([np.eye(n).ravel() for n in dec.factor_dims])
    scale = max(1.0, numeric.sup_norm(t), numeric.sup_norm(ti))
    return (numeric.sup_norm(got - want) <= tol.eq_tol * scale ** 3 * 10
            and numeric.sup_norm(unit - want_unit) <= tol.eq_tol * scale * 10)


def normaliser_from_factors(dec: FactorDecomposition) -> Morphism:
    """The blockwise scalar ``√(c_k) / √(n_k)``; with unit weights this is ``1/√n_k``."""
    scal = np.concatenate([np.full(n * n, np.sqrt(c / n))
                           for n, c in zip(dec.factor_dims, dec.weights)])
    return bk.fhilb(dec.basis @ np.diag(scal) @ dec.iso.payload)


# -- concrete complete positivity ----------------------------------------------------

@dataclass(frozen=True)
class OracleVerdict:
    ok: bool
    min_eig: float
    choi_dim: int

    def __bool__(self):
        return self.ok


def _embedding_indices(dims):
    """For each block coordinate, its (row, col) inside the block-diagonal full matrix."""
    rows, cols, acc = [], [], 0
    for n in dims:
        for i in range(n):
            for j in range(n):
                rows.append(acc + i)
                cols.append(acc + j)
        acc += n
    return np.array(rows), np.array(cols), acc


def concrete_cp_oracle(f: Morphism, dec_a: FactorDecomposition, dec_b: FactorDecomposition,
                       tol: Tolerance = DEFAULT_TOL) -> OracleVerdict:
    """Choi-matrix test of ``ι_B ∘ φ ∘ E_A`` on full matrix algebras.

    ``φ`` is ``f`` in block coordinates, ``E_A`` compresses ``M_N`` onto the
    block diagonal and ``ι_B`` includes block-diagonal matrices into ``M_M``.
    Both are completely positive and ``E_A ∘ ι_A = 1``, so the composite is
    CP exactly when ``f`` is.
    """
    phi = dec_b.iso.payload @ f.payload @ dec_a.basis
    ra, ca, big_n = _embedding_indices(dec_a.factor_dims)
    rb, cb, big_m = _embedding_indices(dec_b.factor_dims)
    choi = np.zeros((big_n, big_m, big_n, big_m), dtype=complex)
    for idx_a in range(phi.shape[1]):
        out = np.zeros((big_m, big_m), dtype=complex)
        out[rb, cb] = phi[:, idx_a]
        choi[ra[idx_a], :, ca[idx_a], :] = out
    choi = choi.reshape(big_n * big_m, big_n * big_m)
    rep = numeric.is_psd(choi, tol)
    return OracleVerdict(rep.ok, rep.min_eig, big_n * big_m)


# -- groupoids ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Groupoid:
    """A finite groupoid on morphisms ``0..n-1``.

    ``compose[g][f]`` is ``g ∘ f`` or ``-1`` when ``dom g ≠ cod f``.
    """

    compose: tuple
    identities: tuple
    inverse: tuple
    dom: tuple
    cod: tuple
    name: str = ""

    @property
    def size(self) -> int:
        return len(self.compose)

    morphism_count = size

    @property
    def objects(self) -> tuple:
        return self.identities

    def __eq__(self, other):
        if not isinstance(other, Groupoid):
            return NotImplemented
        return (self.compose, self.identities, self.inverse, self.dom, self.cod) == (
            other.compose, other.identities, other.inverse, other.dom, other.cod)

    def __hash__(self):
        return hash((self.compose, self.identities))

    @classmethod
    def from_table(cls, table, name: str = "") -> "Groupoid":
        """Derive identities, dom/cod and inverses from a partial table, verifying every axiom."""
        table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(table)
        if any(len(row) != n for row in table):
            raise NotAGroupoid("composition table must be square")
        defined = lambda g, f: table[g][f] >= 0
        for g, f in itertools.product(range(n), repeat=2):
            if defined(g, f) and not 0 <= table[g][f] < n:
                raise NotAGroupoid(f"composite {g}∘{f} out of range")
        ids = tuple(e for e in range(n)
                    if defined(e, e) and table[e][e] == e
                    and all(table[e][f] == f for f in range(n) if defined(e, f))
                    and all(table[f][e] == f for f in range(n) if defined(f, e)))
        dom, cod = [], []
        for g in range(n):
            ds = [e for e in ids if defined(g, e)]
            cs = [e for e in ids if defined(e, g)]
            if len(ds) != 1 or len(cs) != 1:
                raise NotAGroupoid(f"morphism {g} lacks a unique domain/codomain identity")
            dom.append(ds[0])
            cod.append(cs[0])
        for g, f in itertools.product(range(n), repeat=2):
            if defined(g, f) != (dom[g] == cod[f]):
                raise NotAGroupoid(f"{g}∘{f} definedness disagrees with dom/cod")
            if defined(g, f):
                h = table[g][f]
                if dom[h] != dom[f] or cod[h] != cod[g]:
                    raise NotAGroupoid(f"{g}∘{f} has the wrong endpoints")
        for h, g, f in itertools.product(range(n), repeat=3):
            if defined(h, g) and defined(g, f):
                if table[table[h][g]][f] != table[h][table[g][f]]:
                    raise NotAGroupoid(f"associativity fails at ({h}, {g}, {f})")
        inv = []
        for g in range(n):
            cands = [h for h in range(n) if defined(g, h) and table[g][h] == cod[g]
                     and defined(h, g) and table[h][g] == dom[g]]
            if len(cands) != 1:
                raise NotAGroupoid(f"morphism {g} has no unique inverse")
            inv.append(cands[0])
        return cls(table, ids, tuple(inv), tuple(dom), tuple(cod), name)

    @classmethod
    def group(cls, table, name: str = "") -> "Groupoid":
        return cls.from_table(table, name)

    @classmethod
    def indiscrete(cls, k: int) -> "Groupoid":
        """Morphisms ``(y, x): x -> y`` indexed ``y*k + x``; ``(y1, y2) ∘ (x1, x2) = (y1, x2)``."""
        n = k * k
        table = [[-1] * n for _ in range(n)]
        for y1, y2, x1, x2 in itertools.product(range(k), repeat=4):
            if y2 == x1:
                table[y1 * k + y2][x1 * k + x2] = y1 * k + x2
        return cls.from_table(table, f"indiscrete({k})")

    def is_indiscrete(self) -> bool:
        hom = {}
        for g in range(self.size):
            hom[(self.dom[g], self.cod[g])] = hom.get((self.dom[g], self.cod[g]), 0) + 1
        objs = self.identities
        return all(hom.get((a, b), 0) == 1 for a in objs for b in objs)


def cyclic_table(n: int) -> list:
    return [[(g + f) % n for f in range(n)] for g in range(n)]


def klein_table() -> list:
    return [[g ^ f for f in range(4)] for g in range(4)]


def disjoint_union(*gs: Groupoid) -> Groupoid:
    n = sum(g.size for g in gs)
    table = [[-1] * n for _ in range(n)]
    off = 0
    for g in gs:
        for a, b in itertools.product(range(g.size), repeat=2):
            if g.compose[a][b] >= 0:
                table[off + a][off + b] = off + g.compose[a][b]
        off += g.size
    return Groupoid.from_table(table, "⊔".join(g.name or "?" for g in gs))


def groupoid_to_algebra(g: Groupoid) -> fr.AlgebraData:
    """``∇ = {((a, b), a∘b)}`` and unit = the set of identities."""
    n = g.size
    pairs = [(a * n + b, g.compose[a][b]) for a in range(n) for b in range(n)
             if g.compose[a][b] >= 0]
    mult = bk.rel(pairs, n * n, n)
    unit = bk.rel([(0, e) for e in g.identities], 1, n)
    return fr.AlgebraData(Obj(REL, n), mult, unit, g.name or f"groupoid({n})")


def extract_groupoid(f) -> Groupoid:
    """Read the composition table off a special dagger Frobenius algebra in Rel."""
    d = fr._data(f)
    if d.backend is not REL:
        raise BackendMismatch("extract_groupoid needs a Rel algebra")
    rep = fr.check_frobenius(d) if not isinstance(f, fr.FrobeniusAlgebra) else f.report
    if not rep.ok:
        raise NotAGroupoid("relation fails the dagger Frobenius axioms")
    if not fr._special(d, DEFAULT_TOL):
        raise NotAGroupoid("relation is not special")
    n = d.dim
    m = d.mult.matrix  # [k, a*n + b]
    table = [[-1] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            outs = np.nonzero(m[:, a * n + b])[0]
            if len(outs) > 1:
                raise NotAGroupoid(f"product of {a} and {b} is multivalued")
            if len(outs) == 1:
                table[a][b] = int(outs[0])
    g = Groupoid.from_table(table, d.name)
    unit = set(np.nonzero(d.unit.matrix[:, 0])[0].tolist())
    if unit != set(g.identities):
        raise NotAGroupoid("unit relation differs from the set of identities")
    return g


def groupoids_isomorphic(g: Groupoid, h: Groupoid) -> bool:
    """Brute-force relabeling search, pruned by dom/cod; intended for small groupoids."""
    if g.size != h.size or len(g.identities) != len(h.identities):
        return False
    for obj_map in itertools.permutations(h.identities):
        om = dict(zip(g.identities, obj_map))
        buckets = {}
        for x in range(h.size):
            buckets.setdefault((h.dom[x], h.cod[x]), []).append(x)
        keys = [(om[g.dom[x]], om[g.cod[x]]) for x in range(g.size)]
        if sorted(keys) != sorted(k for k, v in buckets.items() for _ in v):
            continue
        if _extend_iso(g, h, om, 0, {}, set()):
            return True
    return False


def _extend_iso(g, h, om, x, mp, used) -> bool:
    if x == g.size:
        return all(g.compose[a][b] < 0 or mp[g.compose[a][b]] == h.compose[mp[a]][mp[b]]
                   for a in range(g.size) for b in range(g.size))
    for y in range(h.size):
        if y in used or h.dom[y] != om[g.dom[x]] or h.cod[y] != om[g.cod[x]]:
            continue
        if x in g.identities and y not in h.identities:
            continue
        mp[x] = y
        used.add(y)
        if _extend_iso(g, h, om, x + 1, mp, used):
            return True
        used.discard(y)
        del mp[x]
    return False


def _as_pairs(r) -> set:
    if isinstance(r, Morphism):
        return set(r.payload.pairs)
    return {(int(a), int(b)) for a, b in r}


def relation_respects_inverses(r, g: Groupoid, h: Groupoid) -> bool:
    """``x R y ⇔ x⁻¹ R y⁻¹`` and ``x R y ⇒ id_dom(x) R id_dom(y)``."""
    pairs = _as_pairs(r)
    for x, y in pairs:
        if not (0 <= x < g.size and 0 <= y < h.size):
            raise ShapeMismatch(f"pair {(x, y)} out of range")
        if (g.inverse[x], h.inverse[y]) not in pairs:
            return False
        if (g.dom[x], h.dom[y]) not in pairs:
            return False
    return True


def groupoid_corpus() -> list:
    """Every groupoid with at most four morphisms, up to isomorphism.

    Built as disjoint unions of groups (orders 1 to 4) and indiscrete groupoids
    on at most two objects.
    """
    groups = {1: [Groupoid.group([[0]], "Z1")],
              2: [Groupoid.group(cyclic_table(2), "Z2")],
              3: [Groupoid.group(cyclic_table(3), "Z3")],
              4: [Groupoid.group(cyclic_table(4), "Z4"), Groupoid.group(klein_table(), "Z2xZ2")]}
    ind2 = Groupoid.indiscrete(2)
    ind2 = Groupoid.from_table(ind2.compose, "I2")
    pieces = [(k, g) for k, gs in groups.items() for g in gs] + [(4, ind2)]
    found = []

    def rec(start, remaining, chosen):
        if chosen:
            found.append(disjoint_union(*chosen) if len(chosen) > 1 else chosen[0])
        for idx in range(start, len(pieces)):
            size, piece = pieces[idx]
            if size <= remaining:
                rec(idx, remaining - size, chosen + [piece])

    rec(0, 4, [])
    return found


def centre_algebra(f, tol: Tolerance = DEFAULT_TOL) -> fr.FrobeniusAlgebra:
    """The centre as a commutative dagger Frobenius subalgebra (orthonormal basis of ``Z(A)``)."""
    d = fr._data(f)
    z = center(d, tol)
    k = z.shape[1]
    m = np.einsum("ak,kij,ib,jc->abc", z.conj().T, d.structure, z, z).reshape(k, k * k)
    u = z.conj().T @ d.unit_vec
    data = fr.AlgebraData(Obj(FHILB, k), bk.fhilb(m), bk.fhilb(u.reshape(-1, 1)),
                          f"Z({d.name})")
    return fr.validate(data, tol)
