"""Command-line front end.

Every command prints a human-readable report that ends with a fenced
``result`` block holding JSON.  Exit codes: 0 when every requested check
passes, 1 when a check fails, 2 on parse or shape errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import backends as bk
from . import classify as cl
from . import cpstar as cs
from . import formats
from . import frobenius as fr
from . import splitdag as sd
from . import stoch as st
from .backends import FHILB, REL
from .errors import CPStarError, ParseError, ShapeMismatch
from .numeric import DEFAULT_TOL, Tolerance

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class Report:
    command: list
    lines: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    def say(self, text: str = "") -> None:
        self.lines.append(text)

    def check(self, name: str, ok: bool, note: str = "") -> bool:
        ok = bool(ok)
        self.checks[name] = ok
        self.say(f"  {'ok  ' if ok else 'FAIL'} {name}" + (f": {note}" if note else ""))
        return ok

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def render(self) -> str:
        head = "$ cpstar " + " ".join(self.command)
        block = {"command": self.command, "passed": self.passed, "checks": self.checks,
                 **self.data}
        body = "\n".join([head, *self.lines])
        return f"{body}\n\n```result\n{json.dumps(block, indent=2, default=_jsonable)}\n```\n"


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return _jsonable_array(x)
    return str(x)


def _jsonable_array(a: np.ndarray):
    if np.iscomplexobj(a):
        if np.allclose(a.imag, 0):
            return a.real.tolist()
        return {"re": a.real.tolist(), "im": a.imag.tolist()}
    return a.tolist()


def _fmt(z) -> str:
    z = complex(z)
    if abs(z.imag) < 1e-12:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _tol(args) -> Tolerance:
    return Tolerance.uniform(args.tol) if args.tol is not None else DEFAULT_TOL


# -- commands ---------------------------------------------------------------------------

def cmd_verify(args, rep: Report) -> None:
    tol = _tol(args)
    d = formats.load_algebra(args.algebra)
    rep.say(f"algebra {d.name or args.algebra}: backend {d.backend.value}, dim {d.dim}")
    r = fr.check_frobenius(d, tol)
    rep.say(f"axiom checks ({r.method})")
    for key in ("associativity", "unitality", "frobenius_law", "dagger_ok"):
        rep.check(key, getattr(r, key))
    if not r.ok:
        return
    f = fr.validate(d, tol)
    rep.check("symmetric", f.symmetric)
    rep.say(f"  special: {f.special}, commutative: {f.commutative}")
    rep.data["special"], rep.data["commutative"] = f.special, f.commutative
    if not rep.check("normalisable", f.normalisable):
        return
    z = f.normaliser
    if z.backend is FHILB:
        ev = np.linalg.eigvalsh((z.payload + z.payload.conj().T) / 2)
        rep.say(f"  normaliser eigenvalues: {', '.join(_fmt(v) for v in ev)}")
        rep.data["normaliser_eigenvalues"] = ev.tolist()
    else:
        pairs = z.payload.sorted_pairs()
        rep.say(f"  normaliser relation: {pairs}")
        rep.data["normaliser_pairs"] = [list(p) for p in pairs]
    rep.check("norm_alt", fr.check_norm_alt(f, z, tol))


def cmd_classify(args, rep: Report) -> None:
    tol = _tol(args)
    d = formats.load_algebra(args.algebra)
    f = fr.validate(d, tol)
    rep.say(f"algebra {d.name or args.algebra}: backend {d.backend.value}, dim {d.dim}")
    if not rep.check("normalisable", f.normalisable):
        return
    if d.backend is FHILB:
        dec = cl.wedderburn(f, tol)
        dims = list(dec.factor_dims)
        rep.say(f"  factors: {dims}  (dim {' + '.join(f'{n}²' for n in dims)} = {d.dim})")
        rep.data["factors"] = dims
        rep.data["weights"] = [float(w) for w in dec.weights]
        rep.check("intertwines", cl.intertwines(f, dec, tol))
        ok = bk.equal(cl.normaliser_from_factors(dec), f.normaliser, tol)
        rep.check("normaliser_matches_factors", ok)
    else:
        g = cl.extract_groupoid(f)
        rep.say(f"  groupoid with {g.size} morphisms on {len(g.objects)} objects")
        rep.say(f"  indiscrete: {g.is_indiscrete()}")
        rep.data["groupoid"] = {"morphisms": g.size, "objects": len(g.objects),
                                "indiscrete": g.is_indiscrete(),
                                "compose": np.asarray(g.compose).tolist()}
        rep.check("groupoid_round_trip",
                  cl.groupoids_isomorphic(g, cl.extract_groupoid(cl.groupoid_to_algebra(g))))


def _oracle(f, a, b, tol):
    if f.backend is FHILB:
        v = cl.concrete_cp_oracle(f, cl.wedderburn(a.algebra, tol), cl.wedderburn(b.algebra, tol), tol)
        return v.ok, {"ok": v.ok, "min_eig": v.min_eig, "choi_dim": v.choi_dim}
    if not (a.algebra.special and b.algebra.special):
        raise CPStarError("the relational oracle needs groupoid (special) algebras")
    ok = cl.relation_respects_inverses(f, cl.extract_groupoid(a.algebra),
                                       cl.extract_groupoid(b.algebra))
    return ok, {"ok": ok, "method": "groupoid inverses"}


def cmd_check_cp(args, rep: Report) -> None:
    tol = _tol(args)
    spec = formats.load_morphism(args.morphism)
    a, b = cs.as_object(fr.validate(spec.source, tol)), cs.as_object(fr.validate(spec.target, tol))
    rep.say(f"morphism {spec.name or args.morphism}: {spec.source_ref} -> {spec.target_ref}"
            f" ({spec.morphism.backend.value})")
    methods = ["rearrange", "convolution", "oracle"] if args.method == "all" else [args.method]
    verdicts = {}
    for m in methods:
        if m == "rearrange":
            v = cs.check_cpstar(spec.morphism, a, b, tol)
            ok, info = v.ok, v.summary()
            note = ""
            if v.min_eig is not None:
                note = f"min rearrangement eigenvalue {v.min_eig:.6g}"
            elif v.failing is not None:
                note = f"failing pair {v.failing}"
        elif m == "convolution":
            v = cs.check_cpstar_convolution(spec.morphism, a, b, tol)
            ok, info, note = v.ok, v.summary(), v.reason
        else:
            ok, info = _oracle(spec.morphism, a, b, tol)
            note = f"oracle min eigenvalue {info['min_eig']:.6g}" if "min_eig" in info else ""
        verdicts[m] = info
        rep.check(m, ok, note)
    rep.data["verdicts"] = verdicts
    if len(methods) > 1:
        agree = len({v["ok"] for v in verdicts.values()}) == 1
        rep.say(f"  methods agree: {agree}")
        rep.data["methods_agree"] = agree


def cmd_embed(args, rep: Report) -> str:
    if args.pants < 1:
        raise ShapeMismatch("--pants needs a positive dimension")
    be = bk.Backend(args.backend)
    d = fr.pants(bk.Obj(be, args.pants)).data
    name = f"pants{args.pants}" + ("_rel" if be is REL else "")
    return formats.write_algebra(fr.AlgebraData(d.carrier, d.mult, d.unit, name))


def cmd_povm(args, rep: Report) -> None:
    tol = _tol(args)
    spec = formats.load_morphism(args.morphism)
    n = int(round(np.sqrt(spec.source.dim)))
    if n * n != spec.source.dim or spec.morphism.backend is not FHILB:
        raise ShapeMismatch("a measurement must start at a pants algebra in FHilb")
    a = fr.validate(spec.target, tol)
    povm = st.extract_povm(spec.morphism, n, a, tol)
    rep.say(f"measurement {spec.name or args.morphism}: C^{n} -> {spec.target_ref}, "
            f"{len(povm.elements)} outcomes")
    ops = povm.operators()
    for i, e in enumerate(ops):
        rows = "; ".join(" ".join(_fmt(v) for v in row) for row in e)
        rep.say(f"  E_{i} = [{rows}]  min eig {np.linalg.eigvalsh(e).min():.6g}")
    defect = povm.completeness_defect()
    rep.check("completeness", defect <= tol.eq_tol * max(1, n), f"‖Σ E_i − I‖∞ = {defect:.3g}")
    rep.data["elements"] = [e for e in ops]
    rep.data["completeness_defect"] = defect


def cmd_split(args, rep: Report) -> None:
    tol = _tol(args)
    d = formats.load_algebra(args.algebra)
    a = cs.as_object(fr.validate(d, tol))
    p = sd.functor_F_object(a, tol)
    rep.say(f"F-idempotent on A*⊗A for {d.name or args.algebra} (dim {a.dim})")
    rep.check("idempotent", bk.equal(p.p @ p.p, p.p, tol))
    rep.check("self_adjoint", bk.equal(bk.dagger(p.p), p.p, tol))
    rep.check("completely_positive", p.certificate.ok)
    rep.check("rank_equals_dim", p.rank == a.dim, f"rank {p.rank}")
    rep.data["rank"] = p.rank
    if args.show:
        rep.data["p"] = p.p.payload if p.p.backend is FHILB else p.p.payload.sorted_pairs()


def _run_criterion(task):
    from . import acceptance
    k, level, seed = task
    return acceptance.CRITERIA[k - 1](level, seed)


def cmd_selftest(args, rep: Report) -> None:
    from . import acceptance
    ks = args.only or list(range(1, len(acceptance.CRITERIA) + 1))
    tasks = [(k, args.level, args.seed) for k in ks]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_run_criterion, tasks))
    else:
        results = [_run_criterion(t) for t in tasks]
    rep.say(f"acceptance suite, level {args.level}, seed {args.seed}")
    for r in results:
        rep.say("  " + r.line())
        rep.checks[f"criterion_{r.number}"] = r.passed
    rep.data["details"] = {r.number: r.details for r in results}


# -- entry point -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cpstar", description="CP* categories over FHilb and Rel")
    p.add_argument("--version", action="version", version=f"cpstar {__version__}")
    p.add_argument("--tol", type=float, default=None,
                   help="override both equality and PSD tolerances")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("verify", help="check the Frobenius axioms and find a normaliser")
    s.add_argument("algebra")
    s = sub.add_parser("classify", help="Wedderburn factors (FHilb) or groupoid (Rel)")
    s.add_argument("algebra")
    s = sub.add_parser("check-cp", help="decide the CP* condition for a morphism file")
    s.add_argument("morphism")
    s.add_argument("--method", choices=["rearrange", "convolution", "oracle", "all"],
                   default="rearrange")
    s = sub.add_parser("embed", help="print the pants algebra of a space or set")
    s.add_argument("--pants", type=int, required=True, metavar="N")
    s.add_argument("--backend", choices=["fhilb", "rel"], default="fhilb")
    s = sub.add_parser("povm", help="extract the POVM of a measurement morphism")
    s.add_argument("morphism")
    s = sub.add_parser("split", help="F-idempotent of an algebra and its rank")
    s.add_argument("algebra")
    s.add_argument("--show", action="store_true", help="include the idempotent in the result")
    s = sub.add_parser("selftest", help="run the acceptance suite")
    s.add_argument("--level", choices=["quick", "full"], default="quick")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--only", type=int, nargs="+")
    return p


COMMANDS = {"verify": cmd_verify, "classify": cmd_classify, "check-cp": cmd_check_cp,
            "embed": cmd_embed, "povm": cmd_povm, "split": cmd_split, "selftest": cmd_selftest}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    rep = Report(argv)
    try:
        out = COMMANDS[args.cmd](args, rep)
    except (ParseError, ShapeMismatch, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CPStarError as exc:
        rep.check(type(exc).__name__, False, str(exc))
        print(rep.render(), end="")
        return EXIT_FAIL
    if isinstance(out, str):
        print(out, end="")
        return EXIT_OK
    print(rep.render(), end="")
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
