"""Hull area against the outlier weight lambda on a noisy plus sign."""

import argparse

from lshull import admm, io, shapes


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lams", nargs="+", type=float, default=[0.5, 1, 2, 4, 8])
    ap.add_argument("--count", type=int, default=30)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--max-iter", type=int, default=5000)
    args = ap.parse_args()

    base = shapes.plus_sign()
    mask = io.add_outliers(base, args.count, args.seed)
    print(f"plus sign: {base.sum()} px, with outliers {mask.sum()} px")
    for lam in args.lams:
        _, hull, _ = admm.run_outlier(mask, admm.SolverConfig.outlier(lam=lam, max_iter=args.max_iter))
        print(f"lambda {lam:>5g}  area {hull.sum():>5d}  plus pixels left out {(base & ~hull).sum():>4d}")


if __name__ == "__main__":
    main()
