"""Command-line entry point.

Commands: ``project``, ``hausdorff``, ``verify`` and ``moduli``.  Every
command prints machine-readable output that starts from the resolved
configuration.  Exit codes: 0 success, 1 usage or config error, 2 numeric
non-convergence, 3 verification violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import numpy as np

from .harness import MAX_SOLVER_FAILURE_RATE, SUITES, ConfigError, load_config, resolve_config, run_suite
from .hausdorff import DEFAULT_SAMPLES, hausdorff_bounds
from .projection import DEFAULT_MAX_ITER, DEFAULT_TOL, project
from .sets import SetSchemaError, from_dict
from .space import SpaceSpec, estimate_modulus_empirical, g_fn, modulus_convexity

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGED = 2
EXIT_VIOLATION = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which is reserved for non-convergence
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _space(p: float, dim: int) -> SpaceSpec:
    try:
        return SpaceSpec(dim, p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_set(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read set file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"set file {path}: invalid JSON ({exc})") from None
    try:
        return from_dict(data)
    except SetSchemaError as exc:
        raise UsageError(f"set file {path}: {exc}") from None


def _emit(obj) -> None:
    print(json.dumps(obj, indent=1, allow_nan=False))


def cmd_project(args) -> int:
    space = _space(args.p, args.dim)
    s = _read_set(args.set)
    x = np.asarray(args.point, dtype=float)
    if x.shape != (space.dim,) or s.dim != space.dim:
        raise UsageError(f"dimension mismatch: --dim {space.dim}, point has {x.size} coordinates, set has dim {s.dim}")
    res = project(space, s, x, tol=args.tol, max_iter=args.max_iter, method=args.method)
    config = {
        "p": space.p,
        "dim": space.dim,
        "point": x.tolist(),
        "set": args.set,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "method": args.method,
    }
    _emit({"command": "project", "config": config, "result": res.to_dict()})
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def cmd_hausdorff(args) -> int:
    space = _space(args.p, args.dim)
    s1, s2 = _read_set(args.set1), _read_set(args.set2)
    for s in (s1, s2):
        if s.dim != space.dim:
            raise UsageError(f"dimension mismatch: --dim {space.dim}, set has dim {s.dim}")
    est = hausdorff_bounds(space, s1, s2, tol=args.tol, samples=args.samples, seed=args.seed)
    config = {"p": space.p, "dim": space.dim, "set1": args.set1, "set2": args.set2, "tol": args.tol, "samples": args.samples, "seed": args.seed}
    _emit({"command": "hausdorff", "config": config, "lower": est.lower, "upper": est.upper, "hausdorff": est.upper})
    return EXIT_OK


def cmd_verify(args) -> int:
    file_values = load_config(args.config) if args.config else None
    overrides = {
        "suite": args.suite,
        "p": args.p,
        "dim": args.dim,
        "trials": args.trials,
        "seed": args.seed,
        "perturbation_scale": args.scale,
        "L": args.L,
        "tolerance": args.tol,
        "proj_tol": args.proj_tol,
        "max_iter": args.max_iter,
        "record_trials": args.records,
    }
    try:
        cfg = resolve_config(file_values, overrides)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    report = run_suite(cfg, workers=args.workers)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json())
    if args.csv:
        report.write_csv(args.csv)
    summary = json.loads(report.to_json(with_records=False))
    summary["command"] = "verify"
    summary["out"] = args.out
    _emit(summary)
    if report.violations:
        return EXIT_VIOLATION
    if report.solver_failure_rate >= MAX_SOLVER_FAILURE_RATE:
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_moduli(args) -> int:
    if not args.p > 1.0 or args.p == float("inf"):
        raise UsageError(f"p must satisfy 1 < p < inf, got {args.p}")
    if args.points < 1:
        raise UsageError("--points must be at least 1")
    space = _space(args.p, args.dim)
    r = space.q if args.dual else space.p
    eps = 2.0 * np.arange(1, args.points + 1) / args.points
    config = {"p": space.p, "exponent": r, "dual": args.dual, "points": args.points, "dim": space.dim, "empirical": args.empirical, "seed": args.seed}
    print("# config " + json.dumps(config, sort_keys=True))
    w = csv.writer(sys.stdout, lineterminator="\n")
    header = ["eps", "delta", "g"]
    if args.empirical:
        header.append("empirical")
    w.writerow(header)
    emp_space = SpaceSpec(space.dim, r)
    for e in eps:
        row = [repr(float(e)), repr(float(modulus_convexity(r, e))), repr(float(g_fn(r, e)))]
        if args.empirical:
            row.append(repr(estimate_modulus_empirical(emp_space, float(e), args.empirical, args.seed)))
        w.writerow(row)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="banachproj", description="Metric projections and continuity estimates in l_p spaces.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pp = sub.add_parser("project", help="project a point onto a set")
    pp.add_argument("--p", type=float, required=True)
    pp.add_argument("--dim", type=int, required=True)
    pp.add_argument("--point", type=_floats, required=True, help="comma-separated coordinates")
    pp.add_argument("--set", required=True, help="JSON set description")
    pp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    pp.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    pp.add_argument("--method", choices=("auto", "fw"), default="auto")
    pp.set_defaults(func=cmd_project)

    ph = sub.add_parser("hausdorff", help="Hausdorff distance between two sets")
    ph.add_argument("--p", type=float, required=True)
    ph.add_argument("--dim", type=int, required=True)
    ph.add_argument("--set1", required=True)
    ph.add_argument("--set2", required=True)
    ph.add_argument("--tol", type=float, default=DEFAULT_TOL)
    ph.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    ph.add_argument("--seed", type=int, default=0)
    ph.set_defaults(func=cmd_hausdorff)

    pv = sub.add_parser("verify", help="run a randomized verification suite")
    pv.add_argument("--suite", choices=SUITES)
    pv.add_argument("--config", help="JSON config file; flags override its values")
    pv.add_argument("--p", type=_floats)
    pv.add_argument("--dim", type=_ints)
    pv.add_argument("--trials", type=int)
    pv.add_argument("--seed", type=int)
    pv.add_argument("--scale", type=float, help="perturbation scale")
    pv.add_argument("--L", type=float, help="Figiel constant")
    pv.add_argument("--tol", type=float, help="margin comparison tolerance")
    pv.add_argument("--proj-tol", type=float)
    pv.add_argument("--max-iter", type=int)
    pv.add_argument("--records", action=argparse.BooleanOptionalAction, default=None, help="keep per-trial records in the report")
    pv.add_argument("--workers", type=int, help="worker processes (default: $BANACHPROJ_THREADS or CPU count)")
    pv.add_argument("--out", help="write the full JSON report here")
    pv.add_argument("--csv", help="write per-trial rows here")
    pv.set_defaults(func=cmd_verify)

    pm = sub.add_parser("moduli", help="tabulate the modulus of convexity")
    pm.add_argument("--p", type=float, required=True)
    pm.add_argument("--points", type=int, default=40, help="eps grid 2k/points, k = 1..points")
    pm.add_argument("--dual", action="store_true", help="use the dual exponent")
    pm.add_argument("--empirical", type=int, default=0, metavar="SAMPLES", help="add a sampled estimate column")
    pm.add_argument("--dim", type=int, default=2, help="dimension for the sampled estimate")
    pm.add_argument("--seed", type=int, default=0)
    pm.set_defaults(func=cmd_moduli)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, ConfigError, SetSchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
