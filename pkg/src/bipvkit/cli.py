"""Command-line entry point.

Commands: tune, assess, validate, area, yield, lcoe, carbon.  Every command
reads one JSON config (``--config``), optionally overridden with repeated
``--set key=value`` flags; ``--out`` redirects the output directory and
``--jobs`` sets the worker count without affecting any result byte.

Exit codes: 0 ok, 1 validation, 2 schema, 3 missing input, 4 computation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import load_config
from .errors import BipvError
from .pipeline import (
    assemble_report,
    compute_areas,
    compute_yields,
    run_assess,
    run_tune,
    run_validate,
    stage,
    write_yield_csv,
    _write_csv,
)
from .report import KG_PER_TONNE, emit, sorted_items

log = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bipvkit",
        description="BIPV assessment from tiled satellite-imagery segmentation outputs",
    )
    parser.add_argument("--version", action="version", version=f"bipvkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("tune", "prompt comparison and box-threshold grid search on the labeled subset"),
        ("assess", "full pipeline: areas, panels, yield, LCOE, carbon, report"),
        ("validate", "check all configured inputs without computing"),
        ("area", "rooftop areas per category only"),
        ("yield", "annual per-panel yield per (category, BIPV type, year)"),
        ("lcoe", "levelized cost per (category, BIPV type)"),
        ("carbon", "carbon-emission reduction per (category, BIPV type, year)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the run config JSON")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument(
            "--jobs",
            type=int,
            default=os.cpu_count() or 1,
            help="worker count; results are independent of this value",
        )
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config entry by dotted path (repeatable)",
        )
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)

    if args.command == "validate":
        violations = run_validate(Path(args.config), args.overrides, args.out)
        for v in violations:
            print(f"violation: {v}")
        print(f"{len(violations)} violation(s)")
        return 1 if violations else 0

    try:
        cfg = load_config(args.config, args.overrides, args.out)
        out = cfg.output_dir
        if args.command == "tune":
            thresholds = run_tune(cfg, jobs=args.jobs)
            print(f"tuned thresholds written to {out}: {thresholds}")
        elif args.command == "assess":
            report = run_assess(cfg, jobs=args.jobs)
            print(f"assessment written to {out} ({len(report.years)} year(s))")
        elif args.command == "area":
            areas = compute_areas(cfg, jobs=args.jobs)
            out.mkdir(parents=True, exist_ok=True)
            rows = [[c.key, areas.area_m2.get(c, 0.0)] for c in sorted(areas.area_m2)]
            rows.append(["AllBuildings", areas.all_buildings_m2])
            rows.append(["OverlapWarnings", areas.overlap_warnings])
            _write_csv(out / "areas.csv", ("category", "total_rooftop_m2"), rows)
            print(f"areas written to {out / 'areas.csv'}")
        elif args.command == "yield":
            yields = compute_yields(cfg, jobs=args.jobs)
            out.mkdir(parents=True, exist_ok=True)
            write_yield_csv(yields, out / "yield.csv")
            print(f"yields written to {out / 'yield.csv'}")
        elif args.command == "lcoe":
            report, _ = assemble_report(cfg, jobs=args.jobs)
            out.mkdir(parents=True, exist_ok=True)
            with stage("emit"):
                rows = [
                    [c.key, b.value, v] for (c, b), v in sorted_items(report.lcoe_cny_per_kwh)
                ]
                _write_csv(out / "lcoe.csv", ("category", "bipv_type", "lcoe_cny_per_kwh"), rows)
            print(f"LCOE written to {out / 'lcoe.csv'}")
        elif args.command == "carbon":
            report, _ = assemble_report(cfg, jobs=args.jobs)
            out.mkdir(parents=True, exist_ok=True)
            with stage("emit"):
                rows = [
                    [c.key, b.value, y, v / KG_PER_TONNE]
                    for (c, b, y), v in sorted_items(report.cer_kg)
                ]
                _write_csv(out / "cer.csv", ("category", "bipv_type", "year", "cer_t_co2"), rows)
            print(f"carbon reduction written to {out / 'cer.csv'}")
    except BipvError as exc:
        where = getattr(exc, "stage", None) or args.command
        print(f"error[{where}]: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
