"""Command-line front end.

Two subcommands:

* ``rvalues``  -- read a p-value table (TSV/CSV with id, p1, p2), compute
  r-values by any method, and echo the table back with an ``r_value``
  column appended (plus optional meta-analysis and replicated columns).
* ``simulate`` -- run the Monte Carlo harness from a scenario file or
  inline flags and emit a metrics CSV.

Exit codes: 0 success, 2 invalid input data or scenario, 3 bad flags.
Output is byte-stable across runs: r-values print as fixed %.4f, input
columns are echoed verbatim, and simulation metrics use fixed formats.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .baselines import meta_p
from .dependence import (fdr_rvalues_all_general_dep,
                         fdr_rvalues_all_threshold_dep,
                         step_up_set_general_dep, step_up_set_threshold_dep)
from .fwer import bonferroni_rvalues_all
from .model import (AnalysisConfig, DatasetError, Method, read_pvalue_table,
                    validate_dataset)
from .rvalue import fdr_rvalues_all, step_up_set
from .selection import refine_for_replicability
from .simulate import (METRICS_CSV_HEADER, estimate, metrics_csv_row,
                       parse_scenario_file, scenario_from_mapping, sweep_c2)

EXIT_OK = 0
EXIT_DATA = 2
EXIT_FLAGS = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; this tool reserves 2 for data
    errors, so flag problems exit 3 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="repval",
                     description="Replication r-values and their simulation "
                                 "harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    rv = sub.add_parser("rvalues", parents=[], help="compute r-values for a "
                        "p-value table", add_help=True)
    rv.add_argument("input", help="TSV/CSV file with header id, p1, p2")
    rv.add_argument("--m", type=int, required=True,
                    help="number of features examined in the primary study")
    rv.add_argument("--l00", type=float, default=0.8,
                    help="lower bound on the null-in-both fraction "
                         "(default 0.8)")
    rv.add_argument("--c2", type=float, default=0.5,
                    help="emphasis on the follow-up study (default 0.5)")
    rv.add_argument("--method", default=Method.FDR_INDEPENDENT.value,
                    choices=[m.value for m in Method],
                    help="r-value procedure (default fdr)")
    rv.add_argument("--t", type=float, default=None,
                    help="selection threshold on primary p-values "
                         "(required for --method fdr-threshold-dep)")
    rv.add_argument("--q", type=float, default=None,
                    help="also emit a replicated yes/no column at this level")
    rv.add_argument("--meta", default="none",
                    choices=["fisher", "stouffer", "none"],
                    help="append a combined-p column (default none)")
    rv.add_argument("--clamp-zero", type=float, default=None, metavar="EPS",
                    help="replace p-values equal to 0 by EPS instead of "
                         "rejecting them")
    rv.add_argument("--refine-q", type=float, default=None, metavar="Q",
                    help="pre-screen the follow-up set by a BH pass at "
                         "level Q on the primary p-values (non-followed "
                         "p-values padded with 1.0) and report r-values on "
                         "the reduced set")
    rv.add_argument("--out", default=None, help="output file (default stdout)")
    rv.add_argument("--format", default=None, choices=["tsv", "csv"],
                    help="output delimiter (default: mirror the input)")
    rv.add_argument("--threads", type=int, default=None,
                    help="parallelism hint; results never depend on it "
                         "(env REPVAL_THREADS when absent)")

    sim = sub.add_parser("simulate", help="estimate error rates and power "
                         "by Monte Carlo")
    sim.add_argument("--scenario", default=None,
                     help="key = value scenario file; inline flags override")
    sim.add_argument("--pi1", type=float, default=None)
    sim.add_argument("--pi2", type=float, default=None)
    sim.add_argument("--seed", type=int, default=None,
                     help="RNG seed (required here or in the scenario file)")
    sim.add_argument("--m", type=int, default=None)
    sim.add_argument("--f00", type=float, default=None)
    sim.add_argument("--f01", type=float, default=None)
    sim.add_argument("--f10", type=float, default=None)
    sim.add_argument("--f11", type=float, default=None)
    sim.add_argument("--l00", type=float, default=None)
    sim.add_argument("--c2", type=float, default=None)
    sim.add_argument("--q", type=float, default=None)
    sim.add_argument("--reps", type=int, default=None)
    sim.add_argument("--rho", type=float, default=None,
                     help="equicorrelation within primary-study blocks")
    sim.add_argument("--block-size", type=int, default=None)
    sim.add_argument("--scenario-id", default=None)
    sim.add_argument("--c2-grid", default=None, metavar="LO:HI:STEP",
                     help="sweep c2 over an inclusive grid, one CSV row per "
                          "point")
    sim.add_argument("--procedure", default="step-up",
                     choices=["step-up", "bonferroni"],
                     help="claim rule whose error rates are estimated")
    sim.add_argument("--out", default=None, help="output file (default stdout)")
    sim.add_argument("--threads", type=int, default=None,
                     help="parallelism hint; results never depend on it")
    return parser


def _resolve_threads(value: Optional[int]) -> int:
    if value is None:
        env = os.environ.get("REPVAL_THREADS", "")
        value = int(env) if env.isdigit() else 1
    return max(1, value)


def _write_output(lines: list[str], out_path: Optional[str]) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_rvalues(args) -> int:
    _resolve_threads(args.threads)
    method = Method(args.method)
    if method is Method.FDR_THRESHOLD_DEP and args.t is None:
        print("repval rvalues: error: --t is required for "
              "--method fdr-threshold-dep", file=sys.stderr)
        return EXIT_FLAGS
    try:
        config = AnalysisConfig(m=args.m, l00=args.l00, c2=args.c2, t=args.t)
    except ValueError as exc:
        print(f"repval rvalues: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS

    try:
        table = read_pvalue_table(args.input, clamp_zero=args.clamp_zero)
        dataset = validate_dataset(table.records, config,
                                   source_lines=table.source_lines)
    except DatasetError as exc:
        print(f"repval rvalues: {args.input}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"repval rvalues: {exc}", file=sys.stderr)
        return EXIT_DATA

    if args.refine_q is not None:
        before = len(dataset)
        try:
            dataset = refine_for_replicability(dataset, config, args.refine_q,
                                               pad_missing=True)
        except ValueError as exc:
            print(f"repval rvalues: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"repval rvalues: refinement kept {len(dataset)} of {before} "
              "features (non-followed primary p-values padded with 1.0; "
              "padding can only shrink this set)", file=sys.stderr)

    try:
        if method is Method.FDR_INDEPENDENT:
            report = fdr_rvalues_all(dataset, config)
        elif method is Method.FDR_GENERAL_DEP:
            report = fdr_rvalues_all_general_dep(dataset, config)
        elif method is Method.FDR_THRESHOLD_DEP:
            report = fdr_rvalues_all_threshold_dep(dataset, config)
        else:
            report = bonferroni_rvalues_all(dataset, config)
    except ValueError as exc:
        print(f"repval rvalues: {exc}", file=sys.stderr)
        return EXIT_DATA

    replicated: Optional[frozenset[str]] = None
    if args.q is not None:
        if method is Method.FDR_INDEPENDENT:
            replicated = step_up_set(dataset, config, args.q).replicated_ids
        elif method is Method.FDR_GENERAL_DEP:
            replicated = step_up_set_general_dep(
                dataset, config, args.q).replicated_ids
        elif method is Method.FDR_THRESHOLD_DEP:
            replicated = step_up_set_threshold_dep(
                dataset, config, args.q).replicated_ids
        else:
            replicated = frozenset(
                fid for fid, r in report.entries if r <= args.q)

    delim = {"tsv": "\t", "csv": ","}.get(args.format or "", table.delimiter)
    rvals = dict(report.entries)
    kept_ids = set(dataset.ids)

    header = list(table.fieldnames) + ["r_value"]
    if args.meta != "none":
        header.append(f"meta_p_{args.meta}")
    if replicated is not None:
        header.append("replicated")
    lines = [delim.join(header)]
    for row, rec in zip(table.rows, table.records):
        if rec.id not in kept_ids:
            continue
        cells = [row.get(col, "") or "" for col in table.fieldnames]
        cells.append(f"{rvals[rec.id]:.4f}")
        if args.meta != "none":
            cells.append(f"{meta_p(rec.p1, rec.p2, args.meta):.6g}")
        if replicated is not None:
            cells.append("yes" if rec.id in replicated else "no")
        lines.append(delim.join(cells))
    _write_output(lines, args.out)
    return EXIT_OK


def _parse_grid(spec: str) -> list[float]:
    try:
        lo, hi, step = (float(part) for part in spec.split(":"))
    except ValueError:
        raise ValueError(f"bad grid {spec!r}, expected LO:HI:STEP") from None
    if step <= 0 or hi < lo:
        raise ValueError(f"bad grid {spec!r}")
    n = int(round((hi - lo) / step)) + 1
    values = [lo + i * step for i in range(n)]
    return [v for v in values if v <= hi + 1e-12]


def cmd_simulate(args) -> int:
    _resolve_threads(args.threads)
    inline = {}
    for key in ("pi1", "pi2", "seed", "m", "f00", "f01", "f10", "f11",
                "l00", "c2", "q", "reps", "rho", "scenario_id"):
        value = getattr(args, key)
        if value is not None:
            inline[key] = value
    if args.block_size is not None:
        inline["block_size"] = args.block_size

    try:
        if args.scenario:
            scenario = parse_scenario_file(args.scenario)
            if inline:
                scenario = replace(scenario, **inline)
        else:
            scenario = scenario_from_mapping(inline)
    except (ValueError, OSError) as exc:
        print(f"repval simulate: bad scenario: {exc}", file=sys.stderr)
        return EXIT_DATA

    lines = [METRICS_CSV_HEADER]
    if args.c2_grid:
        try:
            grid = _parse_grid(args.c2_grid)
        except ValueError as exc:
            print(f"repval simulate: {exc}", file=sys.stderr)
            return EXIT_FLAGS
        for c2v, metrics in sweep_c2(scenario, grid, args.procedure):
            lines.append(metrics_csv_row(replace(scenario, c2=c2v), metrics))
    else:
        metrics = estimate(scenario, args.procedure)
        lines.append(metrics_csv_row(scenario, metrics))
    _write_output(lines, args.out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "rvalues":
        return cmd_rvalues(args)
    return cmd_simulate(args)


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
