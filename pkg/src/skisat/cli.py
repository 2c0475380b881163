"""Command-line front end.

Exit status: 0 solved (or batch completed), 1 unsolved, 2 usage error,
3 input error (malformed DIMACS, invalid config, oracle budget exceeded).
"""

from __future__ import annotations

import argparse
import glob
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .batch import ConfigError, RunConfig, bench, load_run_config, run_one, satlib_id
from .cnf import DimacsError, generate_random_ksat, read_dimacs, serialize_dimacs
from .dynamics import trace_csv
from .metrics import reports_csv
from .perturb import make_schedule
from .reference import WalkSatParams, brute_force, walksat

EXIT_SOLVED, EXIT_UNSOLVED, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3

MODE_ALIASES = {"ski": "ski_pulse", "gaussian": "gaussian_noise", "none": "none"}
ABLATION_ORDER = ("none", "gaussian", "ski")

log = logging.getLogger("skisat")


class InputError(Exception):
    pass


def _load_config(args) -> RunConfig:
    cfg = load_run_config(args.config) if args.config else RunConfig()
    if getattr(args, "trials", None) is not None:
        if args.trials < 1:
            raise InputError("--trials must be >= 1")
        cfg = replace(cfg, trials=args.trials)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed_base=args.seed)
    if getattr(args, "mode", None):
        cfg = cfg.with_mode(MODE_ALIASES[args.mode])
    if getattr(args, "solver", None):
        cfg = replace(cfg, solver=args.solver)
    if getattr(args, "power", None) is not None:
        cfg = replace(cfg, power_watts=args.power)
    return cfg


def _expand(patterns) -> list[str]:
    paths = []
    for pat in patterns:
        hits = sorted(glob.glob(pat))
        if not hits and not Path(pat).exists():
            raise InputError(f"no such file: {pat}")
        paths.extend(hits or [pat])
    return paths


def _write(text: str, dest) -> None:
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)


def cmd_solve(args) -> int:
    cnf = read_dimacs(args.cnf)
    cfg = _load_config(args)
    if args.trace:
        cfg = replace(cfg, dynamics=replace(cfg.dynamics, record_trace=True))
    seed = cfg.seed_base
    rec = run_one(cnf, cfg, seed)
    if args.trace:
        if cfg.solver != "skisat":
            raise InputError("--trace is only available for the skisat solver")
        schedule = make_schedule(cfg.perturbation, cfg.dynamics.max_steps, seed)
        Path(args.trace).write_text(trace_csv(rec, schedule))
        rec.unsat_trace = None
    _write(rec.to_json() + "\n", args.output)
    return EXIT_SOLVED if rec.solved else EXIT_UNSOLVED


def _bench_reports(paths, cfg, jobs, keep):
    reports = []
    for path in paths:
        cnf = read_dimacs(path)
        reports.append(bench(cnf, cfg, satlib_id(path, cnf), jobs, keep))
    return reports


def _emit_reports(reports, fmt, dest) -> None:
    if fmt == "csv":
        _write(reports_csv(reports), dest)
    else:
        payload = [r.to_dict() for r in reports]
        _write(json.dumps(payload if len(payload) > 1 else payload[0], indent=2, sort_keys=True) + "\n", dest)


def cmd_bench(args) -> int:
    cfg = _load_config(args)
    reports = _bench_reports(_expand(args.cnf), cfg, args.jobs, args.records)
    _emit_reports(reports, args.out, args.output)
    return EXIT_SOLVED


def cmd_ablate(args) -> int:
    base = _load_config(args)
    cnf = read_dimacs(args.cnf)
    ident = satlib_id(args.cnf, cnf)
    reports = [bench(cnf, base.with_mode(MODE_ALIASES[m]), ident, args.jobs) for m in ABLATION_ORDER]
    _emit_reports(reports, args.out, args.output)
    return EXIT_SOLVED


def cmd_gen(args) -> int:
    try:
        cnf = generate_random_ksat(args.n, args.m, args.k, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    comment = f"uniform random {args.k}-SAT n={args.n} m={args.m} seed={args.seed}"
    _write(serialize_dimacs(cnf, [comment]), args.output)
    return EXIT_SOLVED


def cmd_oracle(args) -> int:
    cnf = read_dimacs(args.cnf)
    if args.walksat:
        rec = walksat(cnf, WalkSatParams(args.noise, args.cutoff, args.tries, args.seed))
        _write(rec.to_json() + "\n", args.output)
        return EXIT_SOLVED if rec.solved else EXIT_UNSOLVED
    try:
        res = brute_force(cnf)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = {"satisfiable": res.satisfiable, "min_unsat": res.min_unsat, "witness": res.witness}
    _write(json.dumps(out, sort_keys=True) + "\n", args.output)
    return EXIT_SOLVED if res.satisfiable else EXIT_UNSOLVED


def cmd_config_init(args) -> int:
    text = RunConfig().to_json()
    if args.path and Path(args.path).exists() and not args.force:
        raise InputError(f"{args.path} exists (use --force to overwrite)")
    _write(text, args.path)
    return EXIT_SOLVED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skisat", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, trials=True):
        sp.add_argument("--config", help="JSON run-config file (see 'skisat config init')")
        sp.add_argument("--seed", type=int, help="seed (solve) or seed base (bench)")
        sp.add_argument("--mode", choices=sorted(MODE_ALIASES), help="perturbation mode")
        sp.add_argument("--solver", choices=["skisat", "walksat"])
        sp.add_argument("--power", type=float, help="power in watts for energy-to-solution")
        sp.add_argument("--output", "-o", help="write to file instead of stdout")
        if trials:
            sp.add_argument("--trials", type=int)
            sp.add_argument("--jobs", type=int, help="worker processes (default: all CPUs)")
            sp.add_argument("--out", choices=["json", "csv"], default="json")

    sp = sub.add_parser("solve", help="one seeded run, RunRecord JSON on stdout")
    sp.add_argument("cnf")
    common(sp, trials=False)
    sp.add_argument("--trace", metavar="CSV", help="write per-step (step, unsat_count, P) trace")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("bench", help="seeded batch over one or more instances")
    sp.add_argument("cnf", nargs="+", help="DIMACS files or glob patterns")
    common(sp)
    sp.add_argument("--records", action="store_true", help="embed per-trial records in the report")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("ablate", help="none / gaussian / ski comparison on one instance")
    sp.add_argument("cnf")
    common(sp)
    sp.set_defaults(func=cmd_ablate)

    sp = sub.add_parser("gen", help="uniform random k-SAT instance as DIMACS")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("-m", type=int, required=True)
    sp.add_argument("-k", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("oracle", help="exact MAX-SAT by enumeration, or a WalkSAT run")
    sp.add_argument("cnf")
    sp.add_argument("--walksat", action="store_true")
    sp.add_argument("--noise", type=float, default=0.5)
    sp.add_argument("--cutoff", type=int, default=100_000)
    sp.add_argument("--tries", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("config", help="configuration helpers")
    csub = sp.add_subparsers(dest="config_command", required=True)
    ci = csub.add_parser("init", help="write the default run config with every field spelled out")
    ci.add_argument("path", nargs="?")
    ci.add_argument("--force", action="store_true")
    ci.set_defaults(func=cmd_config_init)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except DimacsError as exc:
        print(f"skisat: {getattr(args, 'cnf', '')}: {exc}", file=sys.stderr)
    except (ConfigError, InputError, OSError) as exc:
        print(f"skisat: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
