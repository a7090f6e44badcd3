"""Command-line front end: `risbc sweep | bounds | figure <2|3|4|5>`.

Every run is deterministic for a fixed seed and writes CSVs whose filenames
embed the first 8 hex digits of the canonical-config hash, next to a JSON
manifest sidecar recording the full hash, seed, and output list.  The
`bounds` subcommand (and `figure 5`, which emits a closed-form report next
to its sweep) exits nonzero if any checked inequality is violated.
"""

import argparse
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

from .bounds import standard_bound_reports
from .config import (
    RunManifest,
    config_hash,
    emit_bound_report,
    emit_csv,
    figure5_bound_reports,
    figure_preset,
    parse_config,
    serialize_config,
    write_manifest,
)
from .sweep import run_sweep


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _finish(args, name, config_path, canonical, seed, writers):
    """Write outputs + manifest into --out; writers: [(suffix, fn), ...]."""
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sha = config_hash(canonical)
    full = f"{name}_{sha[:8]}"
    outputs = []
    for suffix, write in writers:
        path = out_dir / f"{full}{suffix}"
        write(path)
        outputs.append(path.name)
        print(f"wrote {path}")
    manifest = RunManifest(
        config_path=config_path,
        output_dir=str(out_dir),
        sweep_name=full,
        config_sha256=sha,
        timestamp=_utc_now(),
        seed=seed,
        outputs=outputs,
    )
    manifest_path = out_dir / f"{full}.manifest.json"
    write_manifest(manifest, manifest_path)
    print(f"wrote {manifest_path}")


def cmd_sweep(args) -> int:
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
        config_path = str(args.config)
    else:
        text, config_path = "", "<defaults>"
    try:
        cfg, plan = parse_config(text)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = cfg.with_updates(seed=args.seed)
        plan = replace(plan, config=cfg)
    if args.reps is not None:
        plan = replace(plan, reps=args.reps)

    result = run_sweep(plan, workers=args.workers)
    _finish(
        args,
        f"sweep_{plan.variable}",
        config_path,
        serialize_config(cfg, plan),
        cfg.seed,
        [(".csv", lambda p: emit_csv(result, p))],
    )
    return 0


def cmd_bounds(args) -> int:
    seed = 0 if args.seed is None else args.seed
    reports = standard_bound_reports(seed=seed, grid_points=args.grid_points)
    canonical = f"[bounds]\nseed = {seed}\ngrid_points = {args.grid_points}\n"
    _finish(
        args,
        "bounds",
        "<none>",
        canonical,
        seed,
        [(".csv", lambda p: emit_bound_report(reports, p))],
    )
    violated = sum(not r.satisfied for r in reports)
    print(f"checked {len(reports)} bounds, {violated} violated")
    return 1 if violated else 0


def cmd_figure(args) -> int:
    seed = 0 if args.seed is None else args.seed
    reps = 200 if args.reps is None else args.reps
    cfg, plan = figure_preset(args.number, seed=seed, reps=reps)
    result = run_sweep(plan, workers=args.workers)

    writers = [(".csv", lambda p: emit_csv(result, p))]
    reports = []
    if args.number == 5:
        reports = figure5_bound_reports(result)
        writers.append(("_bounds.csv", lambda p: emit_bound_report(reports, p)))
    _finish(
        args,
        f"figure{args.number}",
        f"<preset:figure{args.number}>",
        serialize_config(cfg, plan),
        seed,
        writers,
    )
    violated = sum(not r.satisfied for r in reports)
    if violated:
        print(f"{violated} closed-form checks violated", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="risbc",
        description="Sum-SE sweeps and bound reports for the RIS-aided "
        "broadcast downlink with one RIS-only user.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run the configured Monte Carlo sweep")
    p_sweep.add_argument("--config", help="INI config file (omit for defaults)")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_bounds = sub.add_parser("bounds", help="check the analytic bounds, write report")
    p_bounds.add_argument(
        "--grid-points", type=int, default=1000, help="x grid size (default 1000)"
    )
    p_bounds.set_defaults(fn=cmd_bounds)

    p_fig = sub.add_parser("figure", help="run a preset figure sweep")
    p_fig.add_argument("number", type=int, choices=(2, 3, 4, 5))
    p_fig.set_defaults(fn=cmd_figure)

    for p in (p_sweep, p_bounds, p_fig):
        p.add_argument("--out", default=".", help="output directory (default .)")
        p.add_argument("--seed", type=int, default=None, help="override the run seed")
        if p is not p_bounds:
            p.add_argument("--reps", type=int, default=None, help="override replications")
            p.add_argument("--workers", type=int, default=1, help="thread count")

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
