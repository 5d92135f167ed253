"""Run configuration: one JSON file drives every pipeline stage.

Paths inside the file resolve relative to the file's own directory, so a
config can travel with its fixture.  Any leaf can be overridden from the
command line with repeated ``--set dotted.key=value`` flags.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

from .bipv import BipvFactors, BipvType, Cell, FactorCell, PanelSpec, all_cells, default_factors
from .dataset import BuildingCategory
from .econ import (
    DEFAULT_EMISSION_FACTOR,
    CostModel,
    LcoeParams,
)
from .errors import InvalidParameterError, MissingInputError, SchemaError, ValidationError
from .masks import ALL_BUILDINGS
from .metrics import DEFAULT_THRESHOLD_GRID, OBJECTIVES
from .solar import (
    DEFAULT_ALBEDO,
    DEFAULT_GAMMA_PER_C,
    DEFAULT_NOCT_C,
    DEFAULT_SYSTEM_DERATE,
)

DEFAULT_THRESHOLD = 0.25

# Placeholder cost calibration, CNY/W (start) and CNY/W/yr (O&M, rent):
# chosen so the rooftop cells of the shipped demo land in the 0.18..0.20
# CNY/kWh band, with facades and windows ordered by surface rent.
_DEFAULT_COST_ROWS: dict[BuildingCategory, tuple[tuple[float, float, float], ...]] = {
    BuildingCategory.APARTMENT: ((3.26, 0.035, 0.02), (2.4, 0.03, 0.12), (3.0, 0.03, 0.15)),
    BuildingCategory.HOUSE: ((3.26, 0.035, 0.02), (2.4, 0.03, 0.02), (3.0, 0.03, 0.05)),
    BuildingCategory.CENTER_BUILDING: ((3.26, 0.035, 0.02), (2.4, 0.03, 0.05), (3.0, 0.03, 0.06)),
    BuildingCategory.FACTORY: ((3.04, 0.035, 0.02), (2.4, 0.03, 0.005), (3.0, 0.02, 0.005)),
    BuildingCategory.HIGH_RISE_BUILDING: ((3.47, 0.035, 0.02), (2.4, 0.03, 0.14), (3.0, 0.03, 0.13)),
    BuildingCategory.OTHERS: ((3.30, 0.035, 0.02), (2.4, 0.03, 0.035), (3.0, 0.03, 0.04)),
}


def default_costs() -> dict[Cell, CostModel]:
    out = {}
    for cat, row in _DEFAULT_COST_ROWS.items():
        for bipv_type, (c_start, c_om, c_rent) in zip(BipvType, row):
            out[(cat, bipv_type)] = CostModel(c_start=c_start, c_om=c_om, c_rent=c_rent)
    return out


@dataclass(frozen=True)
class SiteConfig:
    latitude_deg: float = 36.8
    longitude_deg: float = 118.05

    def validate(self) -> None:
        if abs(self.latitude_deg) > 90:
            raise ValidationError(f"latitude {self.latitude_deg} outside [-90, 90]")
        if abs(self.longitude_deg) > 180:
            raise ValidationError(f"longitude {self.longitude_deg} outside [-180, 180]")


@dataclass(frozen=True)
class ModelConfig:
    noct_c: float = DEFAULT_NOCT_C
    gamma_per_c: float = DEFAULT_GAMMA_PER_C
    system_derate: float = DEFAULT_SYSTEM_DERATE
    albedo: float = DEFAULT_ALBEDO


@dataclass(frozen=True)
class RunConfig:
    manifest_path: Path
    predictions_dir: Path
    output_dir: Path
    consumption_csv: Path
    weather_by_year: dict[int, Path]
    ground_truth_dir: Optional[Path] = None
    site: SiteConfig = field(default_factory=SiteConfig)
    factors: BipvFactors = field(default_factory=default_factors)
    panel: PanelSpec = field(default_factory=PanelSpec)
    costs: dict[Cell, CostModel] = field(default_factory=default_costs)
    lcoe: LcoeParams = field(default_factory=LcoeParams)
    emission_factor: float = DEFAULT_EMISSION_FACTOR
    thresholds: dict[Union[BuildingCategory, str], float] = field(
        default_factory=lambda: {"default": DEFAULT_THRESHOLD}
    )
    threshold_grid: tuple[float, ...] = DEFAULT_THRESHOLD_GRID
    objective: str = "pa"
    prompt_eval_threshold: float = DEFAULT_THRESHOLD
    model: ModelConfig = field(default_factory=ModelConfig)
    raw: dict = field(default_factory=dict, compare=False)

    def validate_paths(self, need_ground_truth: bool = False) -> None:
        if not self.manifest_path.exists():
            raise MissingInputError(f"manifest not found: {self.manifest_path}")
        if not self.predictions_dir.is_dir():
            raise MissingInputError(f"predictions directory not found: {self.predictions_dir}")
        if not self.consumption_csv.exists():
            raise MissingInputError(f"consumption series not found: {self.consumption_csv}")
        for year, path in sorted(self.weather_by_year.items()):
            if not path.exists():
                raise MissingInputError(f"weather file for year {year} not found: {path}")
        if need_ground_truth and (self.ground_truth_dir is None or not self.ground_truth_dir.is_dir()):
            raise MissingInputError("ground-truth directory is not configured or missing")

    def validate_tables(self) -> None:
        self.site.validate()
        self.factors.validate()
        self.panel.validate()
        self.lcoe.validate()
        for cell in all_cells():
            if cell not in self.costs:
                cat, b = cell
                raise MissingInputError(f"cost table missing cell ({cat.key}, {b.value})")
            self.costs[cell].validate()
        if self.emission_factor <= 0:
            raise ValidationError(f"emission factor must be > 0, got {self.emission_factor}")
        if self.objective not in OBJECTIVES:
            raise ValidationError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        for thr in self.threshold_grid:
            if not 0 <= thr <= 1:
                raise ValidationError(f"threshold grid value {thr} outside [0, 1]")
        for key, thr in self.thresholds.items():
            if not 0 <= thr <= 1:
                raise ValidationError(f"threshold for {key!r} is {thr}, outside [0, 1]")


# ---------------------------------------------------------------------------
# Parsing

def _parse_factors(obj: Mapping) -> BipvFactors:
    cells = {}
    for cat_key, row in obj.items():
        cat = BuildingCategory.from_key(cat_key)
        for type_key, fc in row.items():
            cells[(cat, BipvType.from_key(type_key))] = FactorCell(
                a_over_ra=float(fc["a_over_ra"]), k_mapping=float(fc["k_mapping"])
            )
    return BipvFactors(cells=cells)


def _parse_costs(obj: Mapping) -> dict[Cell, CostModel]:
    out = {}
    for cat_key, row in obj.items():
        cat = BuildingCategory.from_key(cat_key)
        for type_key, cm in row.items():
            out[(cat, BipvType.from_key(type_key))] = CostModel(
                c_start=float(cm["c_start"]),
                c_om=float(cm["c_om"]),
                c_rent=float(cm["c_rent"]),
            )
    return out


def _parse_thresholds(obj, base: Path) -> dict:
    if isinstance(obj, str):
        payload = json.loads((base / obj).read_text())
        return _parse_thresholds(payload, base)
    if isinstance(obj, (int, float)):
        return {"default": float(obj)}
    out: dict = {}
    for key, value in obj.items():
        if key in (ALL_BUILDINGS, "default"):
            out[key] = float(value)
        else:
            out[BuildingCategory.from_key(key)] = float(value)
    return out


def _apply_override(raw: dict, spec_str: str) -> None:
    if "=" not in spec_str:
        raise InvalidParameterError(f"--set expects key=value, got {spec_str!r}")
    dotted, _, value_str = spec_str.partition("=")
    try:
        value = json.loads(value_str)
    except json.JSONDecodeError:
        value = value_str
    node = raw
    keys = dotted.split(".")
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise InvalidParameterError(f"--set path {dotted!r} crosses a non-object value")
    node[keys[-1]] = value


def load_config(
    path: str | Path,
    overrides: Sequence[str] = (),
    out_dir: Optional[str | Path] = None,
) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"config not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    for override in overrides:
        _apply_override(raw, override)
    return config_from_dict(raw, base=path.parent, out_dir=out_dir)


def config_from_dict(
    raw: dict, base: str | Path = ".", out_dir: Optional[str | Path] = None
) -> RunConfig:
    base = Path(base)

    def resolve(key: str, default: Optional[str] = None) -> Optional[Path]:
        value = raw.get(key, default)
        if value is None:
            return None
        return (base / str(value)).resolve()

    required = ("manifest", "predictions_dir", "consumption_csv", "weather_by_year")
    for key in required:
        if key not in raw:
            raise SchemaError(f"config missing required key {key!r}")

    weather = {}
    for year_str, rel in raw["weather_by_year"].items():
        try:
            year = int(year_str)
        except ValueError as exc:
            raise SchemaError(f"weather_by_year key {year_str!r} is not a year") from exc
        weather[year] = (base / str(rel)).resolve()

    site_raw = raw.get("site", {})
    model_raw = raw.get("model", {})
    lcoe_raw = raw.get("lcoe", {})
    cfg = RunConfig(
        manifest_path=resolve("manifest"),
        predictions_dir=resolve("predictions_dir"),
        ground_truth_dir=resolve("ground_truth_dir"),
        output_dir=Path(out_dir).resolve() if out_dir else (resolve("output_dir", "out")),
        consumption_csv=resolve("consumption_csv"),
        weather_by_year=weather,
        site=SiteConfig(
            latitude_deg=float(site_raw.get("latitude_deg", 36.8)),
            longitude_deg=float(site_raw.get("longitude_deg", 118.05)),
        ),
        factors=_parse_factors(raw["factors"]) if "factors" in raw else default_factors(),
        panel=PanelSpec(**raw.get("panel", {})),
        costs=_parse_costs(raw["costs"]) if "costs" in raw else default_costs(),
        lcoe=LcoeParams(
            discount_rate=float(lcoe_raw.get("discount_rate", LcoeParams().discount_rate)),
            horizon_years=int(lcoe_raw.get("horizon_years", LcoeParams().horizon_years)),
            degradation_per_year=float(
                lcoe_raw.get("degradation_per_year", LcoeParams().degradation_per_year)
            ),
        ),
        emission_factor=float(raw.get("emission_factor_kg_per_kwh", DEFAULT_EMISSION_FACTOR)),
        thresholds=_parse_thresholds(raw.get("thresholds", DEFAULT_THRESHOLD), base),
        threshold_grid=tuple(float(t) for t in raw.get("threshold_grid", DEFAULT_THRESHOLD_GRID)),
        objective=str(raw.get("objective", "pa")),
        prompt_eval_threshold=float(raw.get("prompt_eval_threshold", DEFAULT_THRESHOLD)),
        model=ModelConfig(
            noct_c=float(model_raw.get("noct_c", DEFAULT_NOCT_C)),
            gamma_per_c=float(model_raw.get("gamma_per_c", DEFAULT_GAMMA_PER_C)),
            system_derate=float(model_raw.get("system_derate", DEFAULT_SYSTEM_DERATE)),
            albedo=float(model_raw.get("albedo", DEFAULT_ALBEDO)),
        ),
        raw=raw,
    )
    cfg.validate_tables()
    return cfg


def default_config_dict() -> dict:
    """A complete config skeleton with every default table spelled out."""
    factors = default_factors()
    costs = default_costs()
    return {
        "manifest": "manifest.json",
        "predictions_dir": "predictions",
        "ground_truth_dir": "truth",
        "weather_by_year": {"2022": "weather/2022.csv"},
        "consumption_csv": "consumption.csv",
        "output_dir": "out",
        "site": {"latitude_deg": 36.8, "longitude_deg": 118.05},
        "factors": {
            cat.key: {
                b.value: {
                    "a_over_ra": factors.cell(cat, b).a_over_ra,
                    "k_mapping": factors.cell(cat, b).k_mapping,
                }
                for b in BipvType
            }
            for cat in BuildingCategory
        },
        "panel": {
            "length_m": 2.094,
            "width_m": 1.038,
            "depth_m": 0.035,
            "weight_kg": 27.5,
            "installation_area_m2": 2.23,
            "p_max_w": 46.3,
            "v_mp_v": 41.0,
            "i_mp_a": 11.45,
            "rated_power_w": 469.45,
        },
        "costs": {
            cat.key: {
                b.value: {
                    "c_start": costs[(cat, b)].c_start,
                    "c_om": costs[(cat, b)].c_om,
                    "c_rent": costs[(cat, b)].c_rent,
                }
                for b in BipvType
            }
            for cat in BuildingCategory
        },
        "lcoe": {"discount_rate": 0.05, "horizon_years": 25, "degradation_per_year": 0.005},
        "emission_factor_kg_per_kwh": DEFAULT_EMISSION_FACTOR,
        "thresholds": {"default": DEFAULT_THRESHOLD},
        "threshold_grid": list(DEFAULT_THRESHOLD_GRID),
        "objective": "pa",
        "prompt_eval_threshold": DEFAULT_THRESHOLD,
        "model": {
            "noct_c": DEFAULT_NOCT_C,
            "gamma_per_c": DEFAULT_GAMMA_PER_C,
            "system_derate": DEFAULT_SYSTEM_DERATE,
            "albedo": DEFAULT_ALBEDO,
        },
    }


def load_consumption(path: str | Path) -> dict[int, float]:
    """Read the year,kwh consumption series."""
    path = Path(path)
    out: dict[int, float] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != ("year", "kwh"):
            raise SchemaError(f"{path} line 1: header must be year,kwh")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                year, kwh = int(row[0]), float(row[1])
            except (IndexError, ValueError) as exc:
                raise SchemaError(f"{path} line {lineno}: {exc}") from exc
            if year in out:
                raise SchemaError(f"{path} line {lineno}: duplicate year {year}")
            out[year] = kwh
    return out
