"""Regenerate the shipped ``.alg`` / ``.mor`` files under ``src/cpstar/data``."""
from pathlib import Path

from cpstar import corpus, formats
from cpstar import frobenius as fr

OUT = Path(__file__).resolve().parents[1] / "src" / "cpstar" / "data"

# the indiscrete groupoid algebras coincide with pants_rel but are shipped under their own names
ALGEBRAS = ["pants1", "pants2", "pants3", "pants1_rel", "pants2_rel", "pants3_rel",
            "diag2", "diag3", "diag4", "diag2_rel", "c_plus_m2",
            "z2", "z3", "z2xz2", "z2_rel", "z3_rel", "z2xz2_rel",
            "indiscrete1", "indiscrete2", "indiscrete3", "m2_weighted"]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    algs = corpus.algebra_corpus()
    for name in ALGEBRAS:
        d = algs[name]
        d = fr.AlgebraData(d.carrier, d.mult, d.unit, name)
        (OUT / f"{name}.alg").write_text(formats.write_algebra(d))
    for name, (f, src, tgt) in corpus.morphism_corpus().items():
        (OUT / f"{name}.mor").write_text(formats.write_morphism(f, src, tgt, name))
    print(f"wrote {len(ALGEBRAS)} algebras and {len(corpus.morphism_corpus())} morphisms to {OUT}")


if __name__ == "__main__":
    main()
