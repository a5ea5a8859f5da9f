"""Command-line entry point: ``torus-transfer {optimize,sweep,verify,export-plots}``.

Exit codes: 0 success, 1 failed verification, 2 usage or config error,
3 optimization aborted by the Euler step guard (artifacts still written).
"""

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

from . import runs, suites
from .optimizer import OptimizerConfig, descend, sweep_alpha, sweep_lattice

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE, EXIT_ABORTED = 0, 1, 2, 3

# flag name -> config field
CONFIG_FLAGS = {
    "target": "target",
    "seed": "seed",
    "alpha": "alpha",
    "eta": "step_size",
    "iters": "iterations",
    "lattice": "lattice_size",
    "intervals": "interval_count",
    "init_stddev": "init_stddev",
    "log_every": "log_every",
    "method": "method",
    "metric": "gradient_metric",
    "target_file": "target_path",
}


class UsageError(Exception):
    pass


def _add_config_flags(p):
    p.add_argument("--config", help="JSON file with optimizer settings (flags override it)")
    p.add_argument("--target", help="ground, abs-cos, cos3 or custom")
    p.add_argument("--target-file", help="CSV samples for --target custom")
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--eta", type=float, help="step size")
    p.add_argument("--iters", type=int)
    p.add_argument("--lattice", type=int, help="number of lattice points N")
    p.add_argument("--intervals", type=int, help="number of control intervals K")
    p.add_argument("--init-stddev", type=float)
    p.add_argument("--log-every", type=int)
    p.add_argument("--method", choices=("adam", "gd"))
    p.add_argument("--metric", choices=("l2", "euclidean"), help="gradient inner product for --method gd")
    p.add_argument("--out", help="output directory")
    p.add_argument("--force", action="store_true", help="allow writing into a non-empty directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="torus-transfer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run gradient descent and write a run directory")
    _add_config_flags(p)

    p = sub.add_parser("sweep", help="alpha or lattice-size sweep")
    p.add_argument("kind", choices=("alpha", "lattice"))
    p.add_argument("values", nargs="*", help="alphas (descending) or lattice sizes (increasing)")
    _add_config_flags(p)

    p = sub.add_parser("verify", help="run a verification suite and write a JSON report")
    p.add_argument("suite", choices=sorted(suites.SUITES))
    p.add_argument("--run", help="run directory to cross-validate (transfer suite)")
    p.add_argument("--grid", type=int, help="grid size P for the spectral checks")
    p.add_argument("--out", help="output directory")
    p.add_argument("--force", action="store_true")

    p = sub.add_parser("export-plots", help="write states.csv, controls.csv and flow.csv for a run")
    p.add_argument("run_dir")
    return parser


def resolve_config(args):
    data = {}
    if args.config:
        data = runs.load_config(args.config).to_dict()
    for flag, name in CONFIG_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    try:
        return OptimizerConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from None


def cmd_optimize(args):
    config = resolve_config(args)
    out = Path(args.out or f"run_{config.target}_seed{config.seed}")
    runs.prepare_directory(out, args.force)
    result = descend(config)
    artifacts = runs.write_run(out, config, result)
    status = EXIT_ABORTED if result.aborted else EXIT_OK
    runs.append_manifest(out, "optimize", config.to_dict(), artifacts, status)
    print(f"run directory: {out}")
    print(f"final J = {result.report.total:.6e}")
    print(f"L2 mismatch = {result.report.mismatch:.4f}")
    print(f"wall clock = {result.seconds:.1f} s")
    if result.aborted:
        print(f"aborted: {result.abort_reason}", file=sys.stderr)
    return status


def cmd_sweep(args):
    if not args.values:
        raise UsageError(f"sweep {args.kind} needs at least one value")
    config = resolve_config(args)
    try:
        if args.kind == "alpha":
            values = [float(v) for v in args.values]
        else:
            values = [int(v) for v in args.values]
    except ValueError:
        raise UsageError(f"could not parse sweep values {args.values}") from None
    out = Path(args.out or f"sweep_{args.kind}")
    runs.prepare_directory(out, args.force)
    try:
        rows = sweep_alpha(config, values) if args.kind == "alpha" else sweep_lattice(config, values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    header = list(rows[0])
    table = out / f"sweep_{args.kind}.csv"
    runs.write_rows(table, header, ([row[h] for h in header] for row in rows))
    status = EXIT_ABORTED if any(r["aborted"] for r in rows) else EXIT_OK
    runs.append_manifest(out, f"sweep {args.kind}", {**config.to_dict(), "values": values}, [table], status)
    for row in rows:
        print("  ".join(f"{k}={v}" for k, v in row.items()))
    return status


def cmd_verify(args):
    out = Path(args.out or f"verify_{args.suite}")
    runs.prepare_directory(out, args.force)
    kwargs = {}
    if args.grid:
        if args.suite == "gradient":
            raise UsageError("--grid does not apply to the gradient suite")
        kwargs["P"] = args.grid
    if args.run:
        if args.suite != "transfer":
            raise UsageError("--run only applies to the transfer suite")
        kwargs["run"] = runs.load_run(args.run)
    start = time.perf_counter()
    records = suites.SUITES[args.suite](**kwargs)
    passed = all(r["passed"] for r in records)
    report = {"suite": args.suite, "passed": passed, "seconds": time.perf_counter() - start,
              "checks": records}
    path = runs.write_json(out / "report.json", report)
    status = EXIT_OK if passed else EXIT_VERIFY_FAILED
    runs.append_manifest(out, f"verify {args.suite}", {k: str(v) for k, v in vars(args).items()}, [path], status)
    for r in records:
        errs = ", ".join(f"{e:.3g}" for e in r["errors"])
        print(f"[{'PASS' if r['passed'] else 'FAIL'}] {r['name']}: {errs}"
              + (f" (slope {r['slope']:.3f})" if r["slope"] is not None else ""))
    return status


def cmd_export_plots(args):
    files = runs.export_plots(args.run_dir)
    runs.append_manifest(args.run_dir, "export-plots", {"run_dir": args.run_dir}, files, EXIT_OK)
    for f in files:
        print(f)
    return EXIT_OK


COMMANDS = {
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "export-plots": cmd_export_plots,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (UsageError, runs.RunDirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
