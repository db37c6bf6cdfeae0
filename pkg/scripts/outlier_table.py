"""Outlier model on a noisy disk over several seeds."""

import argparse

import numpy as np

from lshull import admm, io, shapes
from lshull.classic import hull_mask
from lshull.metrics import relative_error


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", nargs="+", type=int, default=[1, 2, 3])
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--lam", type=float, default=3.0)
    ap.add_argument("--max-iter", type=int, default=5000)
    args = ap.parse_args()

    clean = shapes.disk(128, 30)
    ref = hull_mask(clean)
    cfg = admm.SolverConfig.outlier(lam=args.lam, max_iter=args.max_iter)
    for seed in args.seeds:
        noisy = io.add_outliers(clean, args.count, seed)
        outliers = noisy & ~clean
        _, hull, rep = admm.run_outlier(noisy, cfg)
        kept = np.count_nonzero(outliers & hull)
        print(f"seed {seed:>3}  relerr {relative_error(ref, hull):.4f}  "
              f"outliers kept {kept}/{np.count_nonzero(outliers)}  {rep.status}")


if __name__ == "__main__":
    main()
