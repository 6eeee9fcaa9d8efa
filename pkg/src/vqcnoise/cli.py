"""Command-line entry point: run a grid slice, regenerate plots, summarize.

Exit codes: 0 full success, 1 partial cell failures, 2 fatal setup errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from .experiment import (ExperimentConfig, GridFilter, GridSpec, build_grid,
                         emit_plots, format_summary_table, load_config,
                         load_run_outputs, parse_mask_list, run_grid,
                         summarize, write_regimes)

log = logging.getLogger(__name__)


def _parse_filter(text: str) -> GridFilter:
    """Parse 'dataset=a,b,sigma=0,0.05,mask=0-15' into a GridFilter.

    Tokens containing '=' start a new key; bare tokens extend the previous
    key's value list.
    """
    values: dict[str, list[str]] = {}
    current: str | None = None
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "=" in token:
            current, first = token.split("=", 1)
            current = current.strip()
            if current not in ("dataset", "sigma", "mask"):
                raise ValueError(f"unknown filter key {current!r}")
            values.setdefault(current, [])
            if first.strip():
                values[current].append(first.strip())
        elif current is None:
            raise ValueError(f"filter token {token!r} has no key")
        else:
            values[current].append(token)
    return GridFilter(
        datasets=tuple(values["dataset"]) if "dataset" in values else None,
        sigmas=tuple(float(s) for s in values["sigma"])
        if "sigma" in values else None,
        masks=parse_mask_list(",".join(values["mask"]))
        if "mask" in values else None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqcnoise",
        description="Noise-robustness benchmark harness for a variational "
                    "quantum classifier")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a grid of experiment cells")
    run.add_argument("--config", help="sectioned key=value config file")
    run.add_argument("--filter", dest="selector",
                     help="cell filter, e.g. dataset=clean,sigma=0,mask=0-15")
    run.add_argument("--repeats", type=int, help="repeat seeds per cell")
    run.add_argument("--workers", type=int, default=0,
                     help="worker processes (0 = all cores)")
    run.add_argument("--out", help="output directory")
    run.add_argument("--data", help="passenger CSV path")
    run.add_argument("--seed", type=int, help="base seed")

    plot = sub.add_parser("plot", help="emit SVG plots from a run directory")
    plot.add_argument("--in", dest="in_dir", required=True)

    summ = sub.add_parser("summarize", help="per-regime accuracy table")
    summ.add_argument("--in", dest="in_dir", required=True)
    return parser


def _cmd_run(args) -> int:
    if args.config:
        cfg, grid = load_config(args.config)
    else:
        cfg, grid = ExperimentConfig(), GridSpec()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.data:
        cfg = replace(cfg, data=replace(cfg.data, csv_path=args.data))
    if args.out:
        cfg = replace(cfg, out_dir=args.out)
    repeats = args.repeats if args.repeats is not None else grid.repeats
    selector = _parse_filter(args.selector) if args.selector else None
    cells = build_grid(cfg, grid, selector)
    print(f"running {len(cells)} cells x {repeats} repeats "
          f"-> {cfg.out_dir}", flush=True)
    records, failures = run_grid(cfg, cells, repeats=repeats,
                                 workers=args.workers, out_dir=cfg.out_dir)
    print(f"wrote {len(records)} records to {cfg.out_dir}")
    if failures:
        print(f"{len(failures)} cell(s) failed; see failures.csv",
              file=sys.stderr)
        return 1
    return 0


def _cmd_plot(args) -> int:
    rows, traces = load_run_outputs(args.in_dir)
    written = emit_plots(rows, traces, args.in_dir)
    print(f"wrote {len(written)} SVG file(s) to {args.in_dir}")
    return 0


def _cmd_summarize(args) -> int:
    rows, _ = load_run_outputs(args.in_dir)
    table = summarize(rows)
    print(format_summary_table(table))
    path = write_regimes(table, args.in_dir)
    print(f"wrote {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "plot":
            return _cmd_plot(args)
        return _cmd_summarize(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
