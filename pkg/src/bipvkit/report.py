"""End-to-end assessment assembly and deterministic emission.

The report joins every pipeline stage: areas, install plan, per-cell-year
energy, LCOE, carbon reduction, and the self-sufficiency series.  Emission
is byte-deterministic: fixed row ordering (category code, BIPV type, year),
repr-exact floats, and no wall-clock unless explicitly requested.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Optional

from .areas import CategoryAreas
from .bipv import BipvType, Cell, InstallCell, InstallPlan, all_cells
from .dataset import BuildingCategory
from .econ import CostModel, LcoeParams, cer, generation_series, lcoe
from .errors import MissingInputError, UndefinedLcoeError, ValidationError

KG_PER_TONNE = 1000.0
KWH_PER_TWH = 1e9

CellYear = tuple[BuildingCategory, BipvType, int]


@dataclass(frozen=True)
class AssessmentReport:
    areas: CategoryAreas
    install: InstallPlan
    energy_kwh: dict[CellYear, float]
    lcoe_cny_per_kwh: dict[Cell, Optional[float]]
    cer_kg: dict[CellYear, float]
    consumption_kwh: dict[int, float]
    self_sufficiency: dict[int, float]
    emission_factor: float
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(sorted({y for (_, _, y) in self.energy_kwh}))

    def generation_kwh(self, year: int) -> float:
        return sum(v for (c, b, y), v in sorted_items(self.energy_kwh) if y == year)

    @property
    def total_cer_kg(self) -> float:
        return sum(v for _, v in sorted_items(self.cer_kg))


def sorted_items(table: Mapping) -> list:
    """Items in deterministic report order: category code, BIPV type, year."""

    def sort_key(key):
        if isinstance(key, tuple):
            parts = []
            for part in key:
                if isinstance(part, BuildingCategory):
                    parts.append(int(part))
                elif isinstance(part, BipvType):
                    parts.append(list(BipvType).index(part))
                else:
                    parts.append(part)
            return tuple(parts)
        return key

    return sorted(table.items(), key=lambda kv: sort_key(kv[0]))


def self_sufficiency(
    generation_kwh: Mapping[int, float], consumption_kwh: Mapping[int, float]
) -> dict[int, float]:
    """Generation over consumption per year; consumption must be positive."""
    ratios: dict[int, float] = {}
    for year in sorted(generation_kwh):
        if year not in consumption_kwh:
            raise MissingInputError(f"consumption series missing year {year}")
        consumption = consumption_kwh[year]
        if consumption <= 0:
            raise ValidationError(f"consumption for year {year} must be > 0, got {consumption}")
        ratios[year] = generation_kwh[year] / consumption
    return ratios


def build_report(
    areas: CategoryAreas,
    install: InstallPlan,
    yields_kwh_per_panel: Mapping[CellYear, float],
    costs: Mapping[Cell, CostModel],
    params: LcoeParams,
    emission_factor: float,
    consumption_kwh: Mapping[int, float],
) -> AssessmentReport:
    """Join install plan, per-panel yields, costs, and consumption.

    Energy per cell-year is panel count times per-panel yield; the LCOE
    generation series extrapolates the mean simulated year with the
    configured degradation.
    """
    params.validate()
    years = sorted({y for (_, _, y) in yields_kwh_per_panel})
    if not years:
        raise MissingInputError("no yields supplied")
    warnings: list[str] = []

    energy: dict[CellYear, float] = {}
    for cat, bipv_type in all_cells():
        cell = install.cell(cat, bipv_type)
        for year in years:
            key = (cat, bipv_type, year)
            if key not in yields_kwh_per_panel:
                raise MissingInputError(
                    f"yield missing for ({cat.key}, {bipv_type.value}, {year})"
                )
            energy[key] = cell.panel_count * yields_kwh_per_panel[key]

    lcoe_table: dict[Cell, Optional[float]] = {}
    for cat, bipv_type in all_cells():
        if (cat, bipv_type) not in costs:
            raise MissingInputError(f"cost table missing cell ({cat.key}, {bipv_type.value})")
        cell = install.cell(cat, bipv_type)
        mean_energy = sum(energy[(cat, bipv_type, y)] for y in years) / len(years)
        series = generation_series(mean_energy, params.degradation_per_year, params.horizon_years)
        try:
            lcoe_table[(cat, bipv_type)] = lcoe(
                costs[(cat, bipv_type)], cell.capacity_w, series, params
            )
        except UndefinedLcoeError:
            lcoe_table[(cat, bipv_type)] = None
            warnings.append(f"lcoe undefined for ({cat.key}, {bipv_type.value}): zero energy")

    cer_table = {key: cer(kwh, emission_factor) for key, kwh in energy.items()}

    generation = {year: sum(energy[(c, b, year)] for c, b in all_cells()) for year in years}
    ratios = self_sufficiency(generation, consumption_kwh)

    return AssessmentReport(
        areas=areas,
        install=install,
        energy_kwh=energy,
        lcoe_cny_per_kwh=lcoe_table,
        cer_kg=cer_table,
        consumption_kwh={y: float(consumption_kwh[y]) for y in years},
        self_sufficiency=ratios,
        emission_factor=emission_factor,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# Emission

REPORT_FILES = {
    "csv": (
        "areas.csv",
        "panels.csv",
        "energy.csv",
        "lcoe.csv",
        "cer.csv",
        "self_sufficiency.csv",
    ),
    "json": ("report.json",),
}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: tuple[str, ...], rows: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def emit(
    report: AssessmentReport,
    fmt: str,
    out_dir: str | Path,
    config_echo: Optional[dict] = None,
    include_timestamp: bool = False,
) -> list[Path]:
    """Write the report tables; returns the created paths.

    ``fmt`` selects ``csv`` (one file per table) or ``json`` (a single
    bundle).  Emission is deterministic: identical reports produce
    byte-identical files unless ``include_timestamp`` is set.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt not in REPORT_FILES:
        raise ValidationError(f"unknown report format {fmt!r}")
    written: list[Path] = []

    if fmt == "csv":
        path = out_dir / "areas.csv"
        rows = [[cat.key, report.areas.area_m2.get(cat, 0.0)] for cat in BuildingCategory]
        rows.append(["AllBuildings", report.areas.all_buildings_m2])
        rows.append(["OverlapWarnings", report.areas.overlap_warnings])
        _write_csv(path, ("category", "total_rooftop_m2"), rows)
        written.append(path)

        path = out_dir / "panels.csv"
        rows = [
            [c.key, b.value, cell.aapv_m2, cell.panel_count, cell.capacity_w]
            for (c, b), cell in sorted_items(report.install.cells)
        ]
        _write_csv(path, ("category", "bipv_type", "aapv_m2", "panel_count", "capacity_w"), rows)
        written.append(path)

        path = out_dir / "energy.csv"
        rows = [[c.key, b.value, y, v] for (c, b, y), v in sorted_items(report.energy_kwh)]
        _write_csv(path, ("category", "bipv_type", "year", "kwh"), rows)
        written.append(path)

        path = out_dir / "lcoe.csv"
        rows = [[c.key, b.value, v] for (c, b), v in sorted_items(report.lcoe_cny_per_kwh)]
        _write_csv(path, ("category", "bipv_type", "lcoe_cny_per_kwh"), rows)
        written.append(path)

        path = out_dir / "cer.csv"
        rows = [
            [c.key, b.value, y, v / KG_PER_TONNE] for (c, b, y), v in sorted_items(report.cer_kg)
        ]
        _write_csv(path, ("category", "bipv_type", "year", "cer_t_co2"), rows)
        written.append(path)

        path = out_dir / "self_sufficiency.csv"
        rows = [
            [y, report.generation_kwh(y), report.consumption_kwh[y], report.self_sufficiency[y]]
            for y in report.years
        ]
        _write_csv(path, ("year", "generation_kwh", "consumption_kwh", "ratio"), rows)
        written.append(path)
        return written

    payload = report_to_dict(report)
    if config_echo is not None:
        payload["config"] = config_echo
    if include_timestamp:
        payload["generated_at"] = datetime.now(timezone.utc).isoformat()
    path = out_dir / "report.json"
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    written.append(path)
    return written


def report_to_dict(report: AssessmentReport) -> dict:
    from . import __version__

    return {
        "version": __version__,
        "emission_factor_kg_per_kwh": report.emission_factor,
        "areas": {
            "per_category_m2": {c.key: report.areas.area_m2.get(c, 0.0) for c in BuildingCategory},
            "all_buildings_m2": report.areas.all_buildings_m2,
            "overlap_warnings": report.areas.overlap_warnings,
        },
        "install": [
            {
                "category": c.key,
                "bipv_type": b.value,
                "aapv_m2": cell.aapv_m2,
                "panel_count": cell.panel_count,
                "capacity_w": cell.capacity_w,
            }
            for (c, b), cell in sorted_items(report.install.cells)
        ],
        "energy_kwh": [
            {"category": c.key, "bipv_type": b.value, "year": y, "kwh": v}
            for (c, b, y), v in sorted_items(report.energy_kwh)
        ],
        "lcoe_cny_per_kwh": [
            {"category": c.key, "bipv_type": b.value, "lcoe": v}
            for (c, b), v in sorted_items(report.lcoe_cny_per_kwh)
        ],
        "cer_kg": [
            {"category": c.key, "bipv_type": b.value, "year": y, "kg": v}
            for (c, b, y), v in sorted_items(report.cer_kg)
        ],
        "consumption_kwh": [
            {"year": y, "kwh": report.consumption_kwh[y]} for y in sorted(report.consumption_kwh)
        ],
        "self_sufficiency": [
            {"year": y, "ratio": report.self_sufficiency[y]}
            for y in sorted(report.self_sufficiency)
        ],
        "summary": {
            "generation_twh_by_year": {
                str(y): round(report.generation_kwh(y) / KWH_PER_TWH, 2) for y in report.years
            },
            "total_cer_t": report.total_cer_kg / KG_PER_TONNE,
        },
        "warnings": list(report.warnings),
    }


def report_from_dict(payload: dict) -> AssessmentReport:
    areas = CategoryAreas(
        area_m2={
            BuildingCategory.from_key(k): v
            for k, v in payload["areas"]["per_category_m2"].items()
        },
        all_buildings_m2=payload["areas"]["all_buildings_m2"],
        overlap_warnings=payload["areas"]["overlap_warnings"],
    )
    install = InstallPlan(
        cells={
            (BuildingCategory.from_key(row["category"]), BipvType(row["bipv_type"])): InstallCell(
                aapv_m2=row["aapv_m2"],
                panel_count=row["panel_count"],
                capacity_w=row["capacity_w"],
            )
            for row in payload["install"]
        }
    )
    energy = {
        (BuildingCategory.from_key(r["category"]), BipvType(r["bipv_type"]), r["year"]): r["kwh"]
        for r in payload["energy_kwh"]
    }
    lcoe_table = {
        (BuildingCategory.from_key(r["category"]), BipvType(r["bipv_type"])): r["lcoe"]
        for r in payload["lcoe_cny_per_kwh"]
    }
    cer_table = {
        (BuildingCategory.from_key(r["category"]), BipvType(r["bipv_type"]), r["year"]): r["kg"]
        for r in payload["cer_kg"]
    }
    return AssessmentReport(
        areas=areas,
        install=install,
        energy_kwh=energy,
        lcoe_cny_per_kwh=lcoe_table,
        cer_kg=cer_table,
        consumption_kwh={r["year"]: r["kwh"] for r in payload["consumption_kwh"]},
        self_sufficiency={r["year"]: r["ratio"] for r in payload["self_sufficiency"]},
        emission_factor=payload["emission_factor_kg_per_kwh"],
        warnings=tuple(payload["warnings"]),
    )


def load_report(path: str | Path) -> AssessmentReport:
    return report_from_dict(json.loads(Path(path).read_text()))
