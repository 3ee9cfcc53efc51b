"""Command-line front end.

Subcommands: ``validate`` (schema plus physics checks), ``run`` (execute a
scenario over one or more seeds, writing all logs), ``compare`` (strategy
sweep with per-epoch mean curves), and ``ga-bench`` (planner timing sweep
with the expert system disabled).  Exit codes: 0 success, 2 validation
failure, 3 runtime failure, 4 I/O failure.  ``UAVSEARCH_OUT`` sets the
default output root (default ./runs).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import engine, kernels, svgplot
from .errors import UavSearchError, ValidationError
from .scenario import load_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_IO = 4

OUT_ENV = "UAVSEARCH_OUT"


def _out_root(value: str | None) -> Path:
    return Path(value or os.environ.get(OUT_ENV, "runs"))


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--seed", type=int, action="append", help="RNG seed (repeatable)")
    p.add_argument("--out", help=f"output directory root (default ${OUT_ENV} or ./runs)")
    p.add_argument("--duration", type=float, help="override scenario duration, seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavsearch",
        description="Cooperative multi-UAV search simulator (backend: %s)" % kernels.backend_name(),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("--scenario", required=True)

    p = sub.add_parser("run", help="run a scenario")
    _add_common(p)
    p.add_argument("--strategy", type=int, choices=(1, 2, 3), help="override scenario strategy")
    p.add_argument("--snapshot-every", type=int, default=0, metavar="N",
                   help="write global map layers every N epochs")

    p = sub.add_parser("compare", help="run a strategy comparison")
    _add_common(p)
    p.add_argument("--strategies", default="1,2,3", help="comma list, default 1,2,3")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("ga-bench", help="planner timing sweep (expert system off)")
    _add_common(p)
    p.add_argument("--m-values", default="6,8,10", help="comma list of horizons")
    p.add_argument("--j-values", default="2,4,6", help="comma list of jump values")
    return parser


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    problems = scenario.validate()
    if problems:
        for p in problems:
            print(f"INVALID {args.scenario}: {p}")
        return EXIT_VALIDATION
    rotors = sum(1 for u in scenario.uavs if u.kind == "rotor")
    print(f"OK {args.scenario}: {rotors} rotors, {len(scenario.uavs) - rotors} fixed-wing, "
          f"{len(scenario.targets)} targets, {len(scenario.denied)} denied areas, "
          f"{scenario.grid.cells_x}x{scenario.grid.cells_y} cells")
    return EXIT_OK


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    seeds = args.seed or [1]
    root = _out_root(args.out)
    aggregate = []
    for seed in seeds:
        out_dir = root / f"{scenario.name}_s{args.strategy or scenario.strategy}_seed{seed}"
        res = engine.run(
            scenario,
            seed=seed,
            strategy=args.strategy,
            out_dir=out_dir,
            snapshot_every=args.snapshot_every,
            duration=args.duration,
        )
        svgplot.render_run(scenario, res, out_dir / "trajectory.svg")
        s = res.summary
        print(f"seed {seed}: targets {s['targets_found']}/{len(scenario.targets)}  "
              f"final chi {s['final_global_chi']:.1f}  final p {s['final_global_p']:.2f}  "
              f"mean GA {1e3 * s['mean_ga_wall_s']:.1f} ms  wall {s['wall_time_s']:.1f} s  "
              f"-> {out_dir}")
        aggregate.append(s)
    if len(seeds) > 1:
        found = [s["targets_found"] for s in aggregate]
        chi = [s["final_global_chi"] for s in aggregate]
        agg = root / f"{scenario.name}_aggregate.csv"
        lines = ["seed,targets_found,final_chi,final_p,mean_ga_s,violations,emergencies"]
        for seed, s in zip(seeds, aggregate):
            lines.append(f"{seed},{s['targets_found']},{s['final_global_chi']!r},"
                         f"{s['final_global_p']!r},{s['mean_ga_wall_s']!r},"
                         f"{s['violations']},{s['emergencies']}")
        agg.write_text("\n".join(lines) + "\n")
        print(f"aggregate: found {min(found)}..{max(found)}, mean final chi {np.mean(chi):.1f} -> {agg}")
    return EXIT_OK


def cmd_compare(args) -> int:
    scenario = load_scenario(args.scenario)
    strategies = [int(s) for s in args.strategies.split(",") if s]
    seeds = args.seed or list(range(1, 11))
    report = engine.compare_strategies(
        scenario, strategies, seeds, duration=args.duration, workers=args.workers
    )
    root = _out_root(args.out)
    root.mkdir(parents=True, exist_ok=True)
    n = len(report[strategies[0]]["mean_chi"])
    lines = ["t," + ",".join(f"chi_s{s},p_s{s}" for s in strategies)]
    dt = scenario.dt
    for k in range(n):
        row = [repr((k + 1) * dt)]
        for s in strategies:
            row.append(repr(float(report[s]["mean_chi"][k])))
            row.append(repr(float(report[s]["mean_p"][k])))
        lines.append(",".join(row))
    curves = root / f"{scenario.name}_compare_curves.csv"
    curves.write_text("\n".join(lines) + "\n")
    print(f"strategy  mean-final-chi  mean-final-p  contact-epochs  found")
    for s in strategies:
        r = report[s]
        print(f"{s:>8}  {np.mean(r['final_chi']):14.1f}  {np.mean(r['final_p']):12.2f}  "
              f"{np.mean(r['contact_epochs']):14.1f}  {np.mean(r['targets_found']):5.1f}")
    print(f"curves -> {curves}")
    return EXIT_OK


def cmd_ga_bench(args) -> int:
    scenario = load_scenario(args.scenario)
    m_values = [int(v) for v in args.m_values.split(",") if v]
    j_values = [int(v) for v in args.j_values.split(",") if v]
    seeds = args.seed or [1]
    rows = engine.ga_bench(
        scenario, m_values, j_values, duration=args.duration or 120.0, seed=seeds
    )
    root = _out_root(args.out)
    root.mkdir(parents=True, exist_ok=True)
    out = root / f"{scenario.name}_ga_bench.csv"
    lines = ["horizon,j,decisions,mean_s,max_s"]
    print("horizon   j  decisions   mean ms    max ms")
    for r in rows:
        lines.append(f"{r['horizon']},{r['j']},{r['decisions']},{r['mean_s']!r},{r['max_s']!r}")
        print(f"{r['horizon']:>7} {r['j']:>3} {r['decisions']:>10} "
              f"{1e3 * r['mean_s']:>9.2f} {1e3 * r['max_s']:>9.2f}")
    out.write_text("\n".join(lines) + "\n")
    print(f"table -> {out}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "compare":
            return cmd_compare(args)
        if args.command == "ga-bench":
            return cmd_ga_bench(args)
        raise AssertionError(args.command)
    except ValidationError as exc:
        for p in exc.problems:
            print(f"validation error: {p}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except UavSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
