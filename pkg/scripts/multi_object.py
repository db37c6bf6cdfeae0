"""Component count of the exact hull of two disks as the threshold c varies."""

import argparse

from lshull import admm, shapes
from lshull.metrics import connected_components


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cs", nargs="+", type=float, default=[5, 10, 15, 25, 30])
    ap.add_argument("--gap", type=float, default=40)
    ap.add_argument("--max-iter", type=int, default=5000)
    args = ap.parse_args()

    a, b = shapes.two_disks(128, 15, args.gap)
    for c in args.cs:
        _, hull, _ = admm.run_exact(a | b, cfg=admm.SolverConfig(c=c, max_iter=args.max_iter))
        print(f"c {c:>5g}  components {connected_components(hull)}  area {hull.sum()}")


if __name__ == "__main__":
    main()
