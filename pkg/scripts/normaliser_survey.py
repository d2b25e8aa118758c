"""Solved normalisers and Wedderburn data for every block algebra with Σ n_k² ≤ bound."""
import argparse

import numpy as np

from cpstar import acceptance
from cpstar import backends as bk
from cpstar import classify as cl
from cpstar import corpus
from cpstar import frobenius as fr


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--bound", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'blocks':<28}{'dim':>4}  {'recovered':<28}{'max |z - z_formula|':>20}  scalars")
    for dims in acceptance.block_dims_up_to(args.bound):
        f = fr.validate(corpus.matrix_sum(dims, rng))
        dec = cl.wedderburn(f, rng=rng)
        err = bk.distance(f.normaliser, cl.normaliser_from_factors(dec))
        scalars = sorted({round(float(1 / np.sqrt(n)), 4) for n in dec.factor_dims})
        print(f"{str(dims):<28}{f.dim:>4}  {str(list(dec.factor_dims)):<28}{err:>20.2e}  {scalars}")


if __name__ == "__main__":
    main()
