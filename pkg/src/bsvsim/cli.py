"""Command-line front end: run scenario files, reproduce preset
experiments, and print the analytic correlation-function tables.

Exit codes: 0 success, 2 configuration error, 3 runtime/statistics error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from . import config as config_mod
from . import presets as presets_mod
from . import runner as runner_mod
from .analysis import StatisticsError, predict_harmonic_g2
from .config import ConfigError
from .detection import EmptySelectionError
from .lightmodel import analytic_gn, bsv, coherent, thermal
from .runner import RunError

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _write_report(rows: list[dict], path: Path):
    if not rows:
        return
    columns = sorted({k for row in rows for k in row})
    with open(path, "w") as fh:
        fh.write(f"# written {time.strftime('%Y-%m-%dT%H:%M:%S')}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(runner_mod._fmt(row.get(c, "")) for c in columns)
                     + "\n")


def cmd_run(args) -> int:
    cfg = config_mod.load(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.pulses is not None:
        cfg = dataclasses.replace(cfg, pulses=args.pulses)
    out = Path(args.out) if args.out else runner_mod.default_output_dir()
    result = runner_mod.run(cfg, out, threads=args.threads, fmt=args.format)
    for row in runner_mod.summary_rows(result):
        print(f"{row['scenario_id']} [{row['parameter']}="
              f"{row['param_value']:g}] {row['estimator_id']}: "
              f"{row['value']:.6g} +/- {row['std_error']:.3g}")
    print(f"outputs written to {out / cfg.scenario_id}")
    return 0


def cmd_reproduce(args) -> int:
    scenarios = presets_mod.expand(args.preset, seed=args.seed,
                                   pulses=args.pulses)
    out = Path(args.out) if args.out else runner_mod.default_output_dir()
    results = []
    for cfg in scenarios:
        print(f"running {cfg.scenario_id} ({cfg.pulses} pulses"
              + (f" x {len(cfg.sweep.values)} points" if cfg.sweep else "")
              + ") ...", flush=True)
        results.append(runner_mod.run(cfg, out, threads=args.threads,
                                      fmt=args.format))
    rows = presets_mod.report(args.preset, results)
    report_path = out / f"{args.preset}_report.csv"
    _write_report(rows, report_path)
    for row in rows:
        print("  ".join(f"{k}={runner_mod._fmt(v)}" for k, v in row.items()))
    print(f"report written to {report_path}")
    return 0


def cmd_gn_table(args) -> int:
    models = [("coherent", coherent(1.0)), ("thermal", thermal(1.0)),
              ("bsv", bsv(1.0))]
    print("pump g(n):")
    print("  n    " + "".join(f"{name:>12}" for name, _ in models))
    for n in range(1, 6):
        print(f"  {n}    " + "".join(f"{str(analytic_gn(m, n)):>12}"
                                     for _, m in models))
    print("harmonic g2 = g(2n)/g(n)^2:")
    print("  n    " + "".join(f"{name:>12}" for name, _ in models))
    for n in (2, 3, 4):
        cells = []
        for _, m in models:
            gs = {k: analytic_gn(m, k) for k in (n, 2 * n)}
            cells.append(f"{float(predict_harmonic_g2(gs, n)):>12.6g}")
        print(f"  {n}    " + "".join(cells))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bsvsim",
        description="Monte-Carlo simulator for harmonic generation from "
                    "light with strong photon-number fluctuations")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed")
        p.add_argument("--pulses", type=int, default=None,
                       help="override the pulse count")
        p.add_argument("--out", default=None,
                       help=f"output directory (default: ${runner_mod.OUTPUT_DIR_ENV}"
                            " or ./out)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (results are thread-count independent)")
        p.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    p_run = sub.add_parser("run", help="run a scenario config file")
    p_run.add_argument("config", help="TOML scenario file")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_rep = sub.add_parser("reproduce", help="run a preset experiment")
    p_rep.add_argument("preset", choices=presets_mod.PRESETS)
    common(p_rep)
    p_rep.set_defaults(func=cmd_reproduce)

    p_gn = sub.add_parser("gn-table",
                          help="print analytic g(n) and harmonic-g2 tables")
    p_gn.set_defaults(func=cmd_gn_table)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RunError, StatisticsError, EmptySelectionError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
