"""Pipeline stages behind the CLI commands.

Each stage is a pure function over the run config; errors raised inside a
``stage(...)`` block carry the stage name so the CLI can tag its message.
Every fold is associative and runs over sorted keys, so results do not
depend on the worker count.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, TypeVar

from .areas import CategoryAreas, aggregate_areas
from .bipv import BipvType, Cell, all_cells, build_install_plan
from .config import RunConfig, load_consumption
from .dataset import BuildingCategory, DatasetManifest, load_manifest
from .errors import BipvError, MissingInputError
from .masks import (
    ALL_BUILDINGS,
    TilePrediction,
    load_ground_truth_dir,
    load_predictions_dir,
)
from .metrics import (
    evaluate_category,
    metrics_row,
    threshold_sweep,
    write_metrics_csv,
    write_metrics_json,
)
from .report import AssessmentReport, build_report, emit
from .solar import WeatherSeries, YieldResult, annual_yield, default_surface_configs, load_weather

log = logging.getLogger(__name__)

T = TypeVar("T")
U = TypeVar("U")


@contextmanager
def stage(name: str):
    try:
        yield
    except BipvError as exc:
        if not getattr(exc, "stage", None):
            exc.stage = name
        raise


def _pmap(fn: Callable[[T], U], items: Sequence[T], jobs: int) -> list[U]:
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


# ---------------------------------------------------------------------------
# Inputs

def load_inputs(cfg: RunConfig) -> tuple[DatasetManifest, dict[str, TilePrediction]]:
    with stage("load"):
        cfg.validate_paths()
        manifest = load_manifest(cfg.manifest_path)
        preds = load_predictions_dir(cfg.predictions_dir)
        for tile_id, pred in preds.items():
            tile = manifest.tile(tile_id)
            pred.validate(tile.width_px, tile.height_px)
    return manifest, preds


# ---------------------------------------------------------------------------
# Stages

def compute_areas(cfg: RunConfig, jobs: int = 1) -> CategoryAreas:
    manifest, preds = load_inputs(cfg)
    with stage("area"):
        return aggregate_areas(preds.values(), manifest, cfg.thresholds, jobs=jobs)


def compute_yields(cfg: RunConfig, jobs: int = 1) -> dict[tuple[BuildingCategory, BipvType, int], YieldResult]:
    """Annual per-panel yield for every (cell, weather year)."""
    with stage("yield"):
        cfg.validate_paths()
        surfaces = default_surface_configs(
            cfg.site.latitude_deg,
            noct_c=cfg.model.noct_c,
            gamma_per_c=cfg.model.gamma_per_c,
            system_derate=cfg.model.system_derate,
            albedo=cfg.model.albedo,
        )
        weather: dict[int, WeatherSeries] = {}
        for year in sorted(cfg.weather_by_year):
            weather[year] = load_weather(cfg.weather_by_year[year])

        keys = [(cell, year) for year in sorted(weather) for cell in all_cells()]

        def one(key: tuple[Cell, int]) -> YieldResult:
            cell, year = key
            return annual_yield(
                weather[year],
                surfaces[cell],
                cfg.panel,
                cfg.site.latitude_deg,
                cfg.site.longitude_deg,
            )

        results = _pmap(one, keys, jobs)
        return {(cell[0], cell[1], year): res for (cell, year), res in zip(keys, results)}


def assemble_report(
    cfg: RunConfig, jobs: int = 1
) -> tuple[AssessmentReport, dict[tuple[BuildingCategory, BipvType, int], YieldResult]]:
    areas = compute_areas(cfg, jobs=jobs)
    with stage("bipv"):
        install = build_install_plan(areas, cfg.factors, cfg.panel)
    yields = compute_yields(cfg, jobs=jobs)
    with stage("report"):
        consumption = load_consumption(cfg.consumption_csv)
        report = build_report(
            areas=areas,
            install=install,
            yields_kwh_per_panel={key: y.kwh_per_panel_yr for key, y in yields.items()},
            costs=cfg.costs,
            params=cfg.lcoe,
            emission_factor=cfg.emission_factor,
            consumption_kwh=consumption,
        )
    return report, yields


def write_yield_csv(
    yields: dict[tuple[BuildingCategory, BipvType, int], YieldResult], path: Path
) -> None:
    rows = [
        (cat.key, b.value, year, y.kwh_per_panel_yr, y.kwh_per_kwp_yr)
        for (cat, b, year), y in sorted(
            yields.items(), key=lambda kv: (int(kv[0][0]), list(BipvType).index(kv[0][1]), kv[0][2])
        )
    ]
    _write_csv(path, ("category", "bipv_type", "year", "kwh_per_panel", "kwh_per_kwp"), rows)


def run_assess(cfg: RunConfig, jobs: int = 1) -> AssessmentReport:
    report, yields = assemble_report(cfg, jobs=jobs)
    with stage("emit"):
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        emit(report, "csv", cfg.output_dir)
        emit(report, "json", cfg.output_dir, config_echo=cfg.raw)
        write_yield_csv(yields, cfg.output_dir / "yield.csv")
    return report


# ---------------------------------------------------------------------------
# Tuning

def _labeled_subset(cfg: RunConfig):
    cfg.validate_paths(need_ground_truth=True)
    manifest = load_manifest(cfg.manifest_path)
    preds = load_predictions_dir(cfg.predictions_dir)
    truths = load_ground_truth_dir(cfg.ground_truth_dir)
    tile_ids = sorted(set(preds) & set(truths))
    if not tile_ids:
        raise MissingInputError("no labeled tiles: predictions and ground truth do not overlap")
    preds = {tid: preds[tid] for tid in tile_ids}
    truths = {tid: truths[tid] for tid in tile_ids}
    return manifest, preds, truths


def run_tune(cfg: RunConfig, jobs: int = 1) -> dict:
    """Prompt comparison and box-threshold grid search on the labeled subset.

    Writes prompts.csv (IoU per prompt per category), sweep.csv (full grid),
    best_thresholds.csv (one row per category), and thresholds.json for
    later pipeline stages.
    """
    with stage("tune"):
        manifest, preds, truths = _labeled_subset(cfg)
        cfg.output_dir.mkdir(parents=True, exist_ok=True)

        prompt_rows = []
        best_prompt: dict[BuildingCategory, Optional[str]] = {}
        for cat in BuildingCategory:
            prompt_ids = sorted(
                {
                    inst.prompt_id
                    for pred in preds.values()
                    for inst in pred.instances
                    if inst.category == cat and inst.prompt_id is not None
                }
            )
            scored = []
            for pid in prompt_ids:
                m = evaluate_category(
                    preds, truths, cat, cfg.prompt_eval_threshold, prompt_id=pid, jobs=jobs
                )
                row = metrics_row(m, cfg.prompt_eval_threshold)
                row["prompt_id"] = pid
                prompt_rows.append(row)
                scored.append((pid, m.iou))
            best_prompt[cat] = (
                min(scored, key=lambda s: (-s[1], s[0]))[0] if scored else None
            )

        sweep_rows = []
        best_rows = []
        thresholds: dict[str, float] = {}
        for cat in BuildingCategory:
            sweep = threshold_sweep(
                preds,
                truths,
                cat,
                cfg.threshold_grid,
                objective=cfg.objective,
                prompt_id=best_prompt[cat],
                jobs=jobs,
            )
            for thr, m in sweep.grid:
                sweep_rows.append(metrics_row(m, thr))
            thresholds[cat.key] = sweep.best_threshold
            best_rows.append(
                (
                    cat.key,
                    best_prompt[cat] or "",
                    sweep.best_threshold,
                    cfg.objective,
                    sweep.best_metrics.pa if cfg.objective == "pa" else sweep.best_metrics.iou,
                )
            )

        all_sweep = threshold_sweep(
            preds, truths, ALL_BUILDINGS, cfg.threshold_grid, objective=cfg.objective, jobs=jobs
        )
        for thr, m in all_sweep.grid:
            sweep_rows.append(metrics_row(m, thr))
        thresholds[ALL_BUILDINGS] = all_sweep.best_threshold

        prompts_path = cfg.output_dir / "prompts.csv"
        with open(prompts_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("category", "prompt_id", "threshold", "tp", "tn", "fp", "fn", "pa", "iou"))
            for row in prompt_rows:
                writer.writerow(
                    [
                        row["category"],
                        row["prompt_id"],
                        repr(float(row["threshold"])),
                        row["tp"],
                        row["tn"],
                        row["fp"],
                        row["fn"],
                        repr(row["pa"]),
                        repr(row["iou"]),
                    ]
                )
        write_metrics_csv(sweep_rows, cfg.output_dir / "sweep.csv")
        write_metrics_json(sweep_rows, cfg.output_dir / "sweep.json")
        _write_csv(
            cfg.output_dir / "best_thresholds.csv",
            ("category", "prompt_id", "best_threshold", "objective", "value"),
            best_rows,
        )
        (cfg.output_dir / "thresholds.json").write_text(
            json.dumps(thresholds, indent=1, sort_keys=True) + "\n"
        )
        return thresholds


# ---------------------------------------------------------------------------
# Validation

def run_validate(cfg_path: Path, overrides: Sequence[str], out_dir) -> list[str]:
    """Check all referenced inputs without computing; returns violations."""
    from .config import load_config

    violations: list[str] = []
    try:
        cfg = load_config(cfg_path, overrides, out_dir)
    except BipvError as exc:
        return [str(exc)]

    for label, path, kind in (
        ("manifest", cfg.manifest_path, "file"),
        ("predictions_dir", cfg.predictions_dir, "dir"),
        ("consumption_csv", cfg.consumption_csv, "file"),
    ):
        ok = path.is_dir() if kind == "dir" else path.exists()
        if not ok:
            violations.append(f"{label}: {path} not found")
    for year, path in sorted(cfg.weather_by_year.items()):
        if not path.exists():
            violations.append(f"weather {year}: {path} not found")

    manifest = None
    if cfg.manifest_path.exists():
        try:
            manifest = load_manifest(cfg.manifest_path)
        except BipvError as exc:
            violations.append(f"manifest: {exc}")

    if cfg.predictions_dir.is_dir():
        try:
            preds = load_predictions_dir(cfg.predictions_dir)
            for tile_id, pred in sorted(preds.items()):
                if manifest is not None:
                    try:
                        tile = manifest.tile(tile_id)
                        pred.validate(tile.width_px, tile.height_px)
                    except BipvError as exc:
                        violations.append(f"prediction {tile_id}: {exc}")
        except BipvError as exc:
            violations.append(f"predictions: {exc}")

    if cfg.ground_truth_dir is not None and cfg.ground_truth_dir.is_dir():
        try:
            load_ground_truth_dir(cfg.ground_truth_dir)
        except BipvError as exc:
            violations.append(f"ground truth: {exc}")

    for year, path in sorted(cfg.weather_by_year.items()):
        if path.exists():
            try:
                load_weather(path)
            except BipvError as exc:
                violations.append(f"weather {year}: {exc}")

    if cfg.consumption_csv.exists():
        try:
            load_consumption(cfg.consumption_csv)
        except BipvError as exc:
            violations.append(f"consumption: {exc}")

    return violations
