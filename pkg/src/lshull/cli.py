"""Command-line front end: one experiment per invocation, or a batch with ``--jobs``.

Subcommands::

    exact      convex hull of every foreground pixel
    outlier    outlier-robust hull (baseline from --clean when given)
    quickhull  classical hull mask only
    compare    exact run plus a table against the quickhull baseline
    noise      add seeded outlier pixels to a mask
    metrics    compare a candidate mask with a reference mask

``--in`` takes PGM/PBM paths or ``shape:NAME`` for a built-in synthetic mask.
"""

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io, metrics, shapes
from .admm import NumericalAbort, SolverConfig, run_exact, run_outlier
from .classic import hull_mask, mask_points, quickhull

EXIT_OK, EXIT_MAX_ITER, EXIT_INPUT, EXIT_ABORT = 0, 2, 3, 4

# flag name -> SolverConfig field
CONFIG_KEYS = {
    "rho0": "rho0", "rho2": "rho2", "rho3": "rho3", "omega": "omega", "mu": "mu",
    "nu": "nu", "lambda": "lam", "c": "c", "delta": "delta", "tol": "tol",
    "max_iter": "max_iter", "init": "init", "angles": "n_angles",
    "percentile": "percentile", "pad": "pad",
}
_INT_FIELDS = {"max_iter", "n_angles", "pad"}


class InputError(Exception):
    pass


@dataclass
class ExperimentRecord:
    input: str
    command: str
    config: dict
    iterations: int = 0
    status: str = "ok"
    relative_error: float | None = None
    convexity_defect: float | None = None
    containment: float | None = None
    wall_time: float = 0.0
    artifacts: list = field(default_factory=list)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)


def read_config_file(path):
    """Flat ``key = value`` file; ``#`` starts a comment. Keys match the long flags."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS and key not in ("seed", "count"):
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(name, value):
    if name == "init":
        return str(value)
    if name in _INT_FIELDS:
        return int(value)
    return float(value)


def build_config(args, outlier=False):
    """Preset, then the --config file, then explicit flags."""
    settings = read_config_file(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    overrides = {}
    for key, value in settings.items():
        if key in CONFIG_KEYS:
            name = CONFIG_KEYS[key]
            try:
                overrides[name] = _coerce(name, value)
            except ValueError as exc:
                raise InputError(f"bad value for {key}: {value!r}") from exc
    try:
        return SolverConfig.outlier(**overrides) if outlier else SolverConfig.exact(**overrides)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def load_input(source):
    if source.startswith("shape:"):
        name = source[len("shape:"):]
        if name not in shapes.SHAPES:
            raise InputError(f"unknown shape {name!r}; known: {', '.join(sorted(shapes.SHAPES))}")
        return shapes.SHAPES[name]()
    try:
        return io.load_mask(source)
    except (OSError, io.FormatError) as exc:
        raise InputError(str(exc)) from exc


def _prefix_for(args, source, batch):
    base = args.out_prefix or "out"
    if not batch:
        return base
    stem = source.split(":", 1)[1] if source.startswith("shape:") else Path(source).stem
    return f"{base}{stem}"


def write_field(phi, prefix, as_csv):
    if as_csv:
        path = f"{prefix}.phi.csv"
        np.savetxt(path, phi, delimiter=",", fmt="%.17g")
    else:
        path = f"{prefix}.phi.lsf"
        io.dump_field(phi, path)
    return path


def write_trace(history, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "metric"])
        for i, v in enumerate(history, 1):
            w.writerow([i, repr(float(v))])


def write_bands(phi, path, levels=(0, 10, 20)):
    """Pixels on each level set, taken as the cells where phi crosses the level along an axis."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["level", "m", "n"])
        for level in levels:
            s = phi - level
            band = np.zeros(phi.shape, dtype=bool)
            for axis in (0, 1):
                band |= (s <= 0) & (np.roll(s, -1, axis) > 0)
                band |= (s > 0) & (np.roll(s, -1, axis) <= 0)
            for m, n in np.argwhere(band):
                w.writerow([level, int(m), int(n)])


def _ensure_parent(prefix):
    parent = Path(prefix).parent
    parent.mkdir(parents=True, exist_ok=True)


def run_experiment(job):
    """Run one job dict; returns ``(record_dict, exit_code, message)``. Safe to call in a worker."""
    command, source, args, prefix = job["command"], job["input"], job["args"], job["prefix"]
    try:
        return _run(command, source, args, prefix)
    except InputError as exc:
        return None, EXIT_INPUT, f"input error: {exc}"
    except NumericalAbort as exc:
        return None, EXIT_ABORT, f"numerical abort: {exc}"


def _run(command, source, args, prefix):
    mask = load_input(source)
    if not mask.any():
        raise InputError(f"{source}: mask has no foreground pixels")
    _ensure_parent(prefix)
    start = time.perf_counter()

    if command == "noise":
        count = args.count
        seed = 0 if args.seed is None else args.seed
        try:
            noisy = io.add_outliers(mask, count, seed)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        path = f"{prefix}.noisy.pgm"
        io.save_mask(noisy, path)
        rec = ExperimentRecord(source, command, {"count": count, "seed": seed}, artifacts=[path])
        return _finish(rec, start, prefix, args)

    if command == "quickhull":
        hull = quickhull(mask_points(mask))
        region = hull_mask(mask)
        path = f"{prefix}.mask.pgm"
        io.save_mask(region, path)
        rec = ExperimentRecord(source, command, {}, relative_error=0.0,
                               convexity_defect=metrics.convexity_defect(region),
                               containment=metrics.containment(mask, region), artifacts=[path])
        rec.config = {"vertices": [list(map(int, v)) for v in hull]}
        return _finish(rec, start, prefix, args)

    if command == "metrics":
        if not args.ref:
            raise InputError("metrics needs --ref")
        ref = load_input(args.ref)
        if ref.shape != mask.shape:
            raise InputError(f"dimension mismatch: {ref.shape} vs {mask.shape}")
        rec = ExperimentRecord(source, command, {"ref": args.ref},
                               relative_error=metrics.relative_error(ref, mask),
                               convexity_defect=metrics.convexity_defect(mask),
                               containment=metrics.containment(ref, mask))
        return _finish(rec, start, prefix, args, write=False)

    outlier = command == "outlier"
    cfg = build_config(args, outlier=outlier)
    if outlier:
        clean = load_input(args.clean) if args.clean else mask
        if clean.shape != mask.shape:
            raise InputError(f"dimension mismatch: {clean.shape} vs {mask.shape}")
        phi, region, report = run_outlier(mask, cfg)
    else:
        clean = mask
        phi, region, report = run_exact(mask, cfg=cfg)
    artifacts = [f"{prefix}.mask.pgm", write_field(phi, prefix, args.csv), f"{prefix}.trace.csv"]
    io.save_mask(region, artifacts[0])
    write_trace(report.history, artifacts[2])
    if args.heatmap:
        artifacts += [f"{prefix}.heat.pgm", f"{prefix}.bands.csv"]
        io.save_heatmap(phi, artifacts[-2])
        write_bands(phi, artifacts[-1])
    if region.any():
        relerr = metrics.relative_error(hull_mask(clean), region)
        defect = metrics.convexity_defect(region)
    else:
        relerr = defect = None
    rec = ExperimentRecord(source, command, cfg.to_dict(), iterations=report.iterations,
                           status=report.status, relative_error=relerr,
                           convexity_defect=defect,
                           containment=metrics.containment(clean, region),
                           artifacts=artifacts)
    return _finish(rec, start, prefix, args, code=EXIT_OK if report.converged else EXIT_MAX_ITER)


def _finish(rec, start, prefix, args, code=EXIT_OK, write=True):
    rec.wall_time = time.perf_counter() - start
    if write:
        path = f"{prefix}.record.json"
        rec.artifacts.append(path)
        Path(path).write_text(rec.to_json() + "\n")
    return asdict(rec), code, ""


def _format_table(records):
    head = f"{'input':<24} {'status':<9} {'iters':>6} {'relerr':>8} {'defect':>8} {'contain':>8} {'time':>7}"
    rows = [head, "-" * len(head)]
    def num(v):
        return "nan" if v is None else f"{v:.4f}"
    for r in records:
        rows.append(f"{r['input']:<24} {r['status']:<9} {r['iterations']:>6d} "
                    f"{num(r['relative_error']):>8} {num(r['convexity_defect']):>8} "
                    f"{num(r['containment']):>8} {r['wall_time']:>6.1f}s")
    return "\n".join(rows)


def make_parser():
    p = argparse.ArgumentParser(prog="lshull", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("exact", "outlier", "quickhull", "compare", "noise", "metrics"):
        s = sub.add_parser(name)
        s.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="PATH")
        s.add_argument("--out-prefix", default=None)
        s.add_argument("--config", default=None, help="key=value file; flags win")
        for key in ("rho0", "rho2", "rho3", "omega", "mu", "nu", "c", "delta", "tol", "percentile"):
            s.add_argument(f"--{key}", type=float, default=None)
        s.add_argument("--lambda", dest="lambda", type=float, default=None)
        s.add_argument("--max-iter", dest="max_iter", type=int, default=None)
        s.add_argument("--angles", type=int, default=None)
        s.add_argument("--pad", type=int, default=None)
        s.add_argument("--init", choices=("polygon", "percentile", "sdf"), default=None)
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("--csv", action="store_true", help="write the field as CSV instead of LSF1")
        s.add_argument("--heatmap", action="store_true", help="also write a PGM heatmap and level bands")
        s.add_argument("--jobs", type=int, default=1)
        s.add_argument("--count", type=int, default=50, help="outlier count for noise")
        s.add_argument("--clean", default=None, help="clean reference mask for outlier")
        s.add_argument("--ref", default=None, help="reference mask for metrics")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.config:
        try:
            extra = read_config_file(args.config)
        except InputError as exc:
            print(f"input error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        if args.seed is None and "seed" in extra:
            args.seed = int(extra["seed"])
    if args.jobs < 1:
        print("input error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    batch = len(args.inputs) > 1
    jobs = [{"command": args.command, "input": source, "args": args,
             "prefix": _prefix_for(args, source, batch)} for source in args.inputs]
    if args.jobs > 1 and batch:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_experiment, jobs))
    else:
        results = [run_experiment(j) for j in jobs]

    records, worst = [], EXIT_OK
    for rec, code, msg in results:
        if msg:
            print(msg, file=sys.stderr)
        if rec is not None:
            records.append(rec)
        # input and numerical failures outrank max_iter
        worst = max(worst, code, key=lambda c: (c in (EXIT_INPUT, EXIT_ABORT), c))
    if args.command == "compare" and records:
        print(_format_table(records))
    else:
        for rec in records:
            print(json.dumps({k: v for k, v in rec.items() if k != "wall_time"}, sort_keys=True))
    return worst


if __name__ == "__main__":
    sys.exit(main())
