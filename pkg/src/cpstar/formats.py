"""Line-oriented text formats for algebras (``.alg``) and morphisms (``.mor``).

Algebra files::

    name pants2
    backend fhilb            # or rel
    dim 4                    # or: carrier a b c   (labels usable as indices)
    mult 0 0 0 1.0 0.0       # ∇(e_i ⊗ e_j) has coefficient re + im·i at e_k
    unit 0 1.0 0.0

In Rel, ``mult i j k`` means ``((i, j), k) ∈ ∇`` and ``unit k`` that ``k``
is in the unit.  Morphism files name their endpoints (a shipped algebra name
or a path relative to the file) and list ``entry row col re im`` (FHilb) or
``pair source target`` (Rel).  Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import backends as bk
from . import frobenius as fr
from .backends import FHILB, REL, Morphism, Obj
from .errors import ParseError

CORPUS_ENV = "CPSTAR_CORPUS"


@dataclass(frozen=True, eq=False)
class MorphismSpec:
    morphism: Morphism
    source: fr.AlgebraData
    target: fr.AlgebraData
    name: str = ""
    source_ref: str = ""
    target_ref: str = ""


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _num(tok: str, no: int) -> float:
    try:
        return float(tok)
    except ValueError as exc:
        raise ParseError(f"line {no}: expected a number, got {tok!r}") from exc


def parse_algebra(text: str) -> fr.AlgebraData:
    name, backend, dim, labels = "", None, None, None
    mult, unit = [], []
    for no, toks in _lines(text):
        key, args = toks[0], toks[1:]
        if key == "name":
            name = " ".join(args)
        elif key == "backend":
            if len(args) != 1 or args[0] not in ("fhilb", "rel"):
                raise ParseError(f"line {no}: backend must be fhilb or rel")
            backend = bk.Backend(args[0])
        elif key == "dim":
            if len(args) != 1:
                raise ParseError(f"line {no}: dim takes one value")
            dim = int(_num(args[0], no))
        elif key == "carrier":
            labels = list(args)
            dim = len(labels)
        elif key in ("mult", "unit"):
            (mult if key == "mult" else unit).append((no, args))
        else:
            raise ParseError(f"line {no}: unknown field {key!r}")
    if backend is None or dim is None:
        raise ParseError("algebra file needs 'backend' and 'dim' (or 'carrier')")
    if dim < 1:
        raise ParseError("dim must be positive")
    index = {lab: i for i, lab in enumerate(labels)} if labels else {}

    def idx(tok, no):
        if tok in index:
            return index[tok]
        try:
            v = int(tok)
        except ValueError as exc:
            raise ParseError(f"line {no}: unknown index {tok!r}") from exc
        if not 0 <= v < dim:
            raise ParseError(f"line {no}: index {v} out of range 0..{dim - 1}")
        return v

    width = 3 if backend is REL else 5
    m = np.zeros((dim, dim * dim), dtype=complex)
    for no, args in mult:
        if len(args) != width:
            raise ParseError(f"line {no}: mult takes {width} fields for {backend.value}")
        i, j, k = (idx(t, no) for t in args[:3])
        m[k, i * dim + j] += 1 if backend is REL else complex(_num(args[3], no), _num(args[4], no))
    u = np.zeros(dim, dtype=complex)
    for no, args in unit:
        if len(args) != width - 2:
            raise ParseError(f"line {no}: unit takes {width - 2} fields for {backend.value}")
        k = idx(args[0], no)
        u[k] += 1 if backend is REL else complex(_num(args[1], no), _num(args[2], no))
    return fr.AlgebraData(Obj(backend, dim), bk.from_matrix(backend, m), bk.point(backend, u), name)


def _fmt(x: float) -> str:
    return repr(float(x) + 0.0)  # folds -0.0 into 0.0


def write_algebra(d) -> str:
    d = fr._data(d)
    n = d.dim
    out = []
    if d.name:
        out.append(f"name {d.name}")
    out += [f"backend {d.backend.value}", f"dim {n}"]
    if d.backend is REL:
        for k, col in zip(*np.nonzero(d.mult.matrix)):
            out.append(f"mult {col // n} {col % n} {k}")
        for k in np.nonzero(d.unit.matrix[:, 0])[0]:
            out.append(f"unit {k}")
    else:
        m = d.mult.payload
        for k, col in zip(*np.nonzero(m)):
            z = m[k, col]
            out.append(f"mult {col // n} {col % n} {k} {_fmt(z.real)} {_fmt(z.imag)}")
        for k in np.nonzero(d.unit.payload[:, 0])[0]:
            z = d.unit.payload[k, 0]
            out.append(f"unit {k} {_fmt(z.real)} {_fmt(z.imag)}")
    return "\n".join(out) + "\n"


# -- corpus lookup ----------------------------------------------------------------------

def corpus_dirs() -> list:
    dirs = []
    env = os.environ.get(CORPUS_ENV)
    if env:
        dirs += [Path(p) for p in env.split(os.pathsep) if p]
    dirs.append(Path(str(resources.files("cpstar") / "data")))
    return dirs


def resolve_algebra(ref: str, base: Path | None = None) -> fr.AlgebraData:
    """A path (absolute, or relative to ``base``), a corpus file stem, or a builtin name."""
    from . import corpus

    candidates = [Path(ref)]
    if base is not None:
        candidates.insert(0, base / ref)
    for d in corpus_dirs():
        candidates += [d / ref, d / f"{ref}.alg"]
    for c in candidates:
        if c.is_file():
            return parse_algebra(c.read_text())
    builtin = corpus.algebra_corpus()
    if ref in builtin:
        return builtin[ref]
    raise ParseError(f"cannot resolve algebra {ref!r}")


def parse_morphism(text: str, base: Path | None = None) -> MorphismSpec:
    name, src_ref, tgt_ref = "", None, None
    entries, pairs = [], []
    for no, toks in _lines(text):
        key, args = toks[0], toks[1:]
        if key == "name":
            name = " ".join(args)
        elif key == "source":
            src_ref = " ".join(args)
        elif key == "target":
            tgt_ref = " ".join(args)
        elif key == "entry":
            if len(args) != 4:
                raise ParseError(f"line {no}: entry takes row col re im")
            entries.append((int(_num(args[0], no)), int(_num(args[1], no)),
                            complex(_num(args[2], no), _num(args[3], no)), no))
        elif key == "pair":
            if len(args) != 2:
                raise ParseError(f"line {no}: pair takes source target")
            pairs.append((int(_num(args[0], no)), int(_num(args[1], no)), no))
        else:
            raise ParseError(f"line {no}: unknown field {key!r}")
    if src_ref is None or tgt_ref is None:
        raise ParseError("morphism file needs 'source' and 'target'")
    src, tgt = resolve_algebra(src_ref, base), resolve_algebra(tgt_ref, base)
    if src.backend != tgt.backend:
        raise ParseError("source and target use different backends")
    n, m = src.dim, tgt.dim
    if src.backend is FHILB:
        if pairs:
            raise ParseError("FHilb morphisms use 'entry' lines")
        mat = np.zeros((m, n), dtype=complex)
        for r, c, v, no in entries:
            if not (0 <= r < m and 0 <= c < n):
                raise ParseError(f"line {no}: entry ({r}, {c}) outside {m}x{n}")
            mat[r, c] += v
        f = bk.fhilb(mat)
    else:
        if entries:
            raise ParseError("Rel morphisms use 'pair' lines")
        for s, t, no in pairs:
            if not (0 <= s < n and 0 <= t < m):
                raise ParseError(f"line {no}: pair ({s}, {t}) out of range")
        f = bk.rel([(s, t) for s, t, _ in pairs], n, m)
    return MorphismSpec(f, src, tgt, name, src_ref, tgt_ref)


def write_morphism(f: Morphism, source_ref: str, target_ref: str, name: str = "") -> str:
    out = [f"name {name}"] if name else []
    out += [f"source {source_ref}", f"target {target_ref}"]
    if f.backend is REL:
        out += [f"pair {s} {t}" for s, t in f.payload.sorted_pairs()]
    else:
        for r, c in zip(*np.nonzero(f.payload)):
            z = f.payload[r, c]
            out.append(f"entry {r} {c} {_fmt(z.real)} {_fmt(z.imag)}")
    return "\n".join(out) + "\n"


def load_algebra(path) -> fr.AlgebraData:
    p = Path(path)
    if not p.is_file():
        return resolve_algebra(str(path))
    return parse_algebra(p.read_text())


def load_morphism(path) -> MorphismSpec:
    p = Path(path)
    if not p.is_file():
        for d in corpus_dirs():
            for c in (d / str(path), d / f"{path}.mor"):
                if c.is_file():
                    p = c
                    break
            else:
                continue
            break
        else:
            raise ParseError(f"cannot find morphism file {path!r}")
    return parse_morphism(p.read_text(), p.parent)
