"""How much depolarising noise makes the transpose on M_n completely positive?

The Choi matrix of ``(1 - p) T + p Tr(·) I/n`` has smallest eigenvalue
``-(1 - p) + p/n``, so the map turns CP at ``p* = n / (n + 1)``.  The script
scans ``p`` and compares the three checkers with that closed form.
"""
import argparse

import numpy as np

from cpstar import classify as cl
from cpstar import corpus
from cpstar import cpstar as cs
from cpstar import frobenius as fr
from cpstar.backends import FHILB, Obj, fhilb


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--steps", type=int, default=21)
    args = ap.parse_args()
    n = args.n
    a = cs.as_object(fr.pants(Obj(FHILB, n)))
    dec = cl.wedderburn(a.algebra)
    t = corpus.transpose_map(n).payload
    dep = corpus.depolarizing(n, 1.0).payload
    print(f"n={n}  predicted threshold p* = {n / (n + 1):.4f}")
    print("   p    min_eig  predicted  rearrange  convolution  oracle")
    for p in np.linspace(0, 1, args.steps):
        f = fhilb((1 - p) * t + p * dep)
        r = cs.check_cpstar(f, a, a)
        c = cs.check_cpstar_convolution(f, a, a)
        o = cl.concrete_cp_oracle(f, dec, dec)
        print(f"{p:5.2f}  {r.min_eig:8.4f}  {-(1 - p) + p / n:9.4f}  {r.ok!s:>9}  "
              f"{c.ok!s:>11}  {o.ok!s:>6}")


if __name__ == "__main__":
    main()
