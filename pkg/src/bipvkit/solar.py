"""Hourly solar geometry, plane-of-array irradiance, and DC energy yield.

The solar position follows the NOAA spreadsheet approximation (geometric
mean longitude / anomaly, equation of time), good to a fraction of a degree,
which is ample for annual energy at hourly resolution.  Transposition is
isotropic-sky with a fixed ground albedo; module power is a linear
temperature-corrected model around STC with a whole-system derate.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .bipv import BipvType, Cell, PanelSpec, all_cells
from .dataset import BuildingCategory
from .errors import InvalidParameterError, SchemaError, ValidationError

log = logging.getLogger(__name__)

DEFAULT_ALBEDO = 0.2
DEFAULT_NOCT_C = 45.0
DEFAULT_GAMMA_PER_C = -0.0035
DEFAULT_SYSTEM_DERATE = 0.86

WEATHER_COLUMNS = ("timestamp", "ghi", "dni", "dhi", "temp_air", "wind_speed")

_SECONDS_PER_DAY = 86400.0
_UNIX_EPOCH_JD = 2440587.5


# ---------------------------------------------------------------------------
# Solar position (NOAA spreadsheet approximation)

def _julian_day(ts: datetime) -> float:
    if ts.tzinfo is None:
        raise InvalidParameterError(f"timestamp {ts.isoformat()} must be offset-aware")
    return ts.timestamp() / _SECONDS_PER_DAY + _UNIX_EPOCH_JD


def _position_arrays(jd: np.ndarray, latitude_deg: float, longitude_deg: float):
    """Zenith and azimuth (degrees) for an array of Julian days."""
    jc = (jd - 2451545.0) / 36525.0
    gmls = np.mod(280.46646 + jc * (36000.76983 + 0.0003032 * jc), 360.0)
    gmas = 357.52911 + jc * (35999.05029 - 0.0001537 * jc)
    eeo = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc)
    seoc = (
        np.sin(np.radians(gmas)) * (1.914602 - jc * (0.004817 + 0.000014 * jc))
        + np.sin(np.radians(2 * gmas)) * (0.019993 - 0.000101 * jc)
        + np.sin(np.radians(3 * gmas)) * 0.000289
    )
    stl = gmls + seoc
    sal = stl - 0.00569 - 0.00478 * np.sin(np.radians(125.04 - 1934.136 * jc))
    moe = 23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0
    oc = moe + 0.00256 * np.cos(np.radians(125.04 - 1934.136 * jc))
    declination = np.degrees(np.arcsin(np.sin(np.radians(oc)) * np.sin(np.radians(sal))))
    var_y = np.tan(np.radians(oc / 2.0)) ** 2
    eot_min = 4.0 * np.degrees(
        var_y * np.sin(2 * np.radians(gmls))
        - 2 * eeo * np.sin(np.radians(gmas))
        + 4 * eeo * var_y * np.sin(np.radians(gmas)) * np.cos(2 * np.radians(gmls))
        - 0.5 * var_y * var_y * np.sin(4 * np.radians(gmls))
        - 1.25 * eeo * eeo * np.sin(2 * np.radians(gmas))
    )
    minutes_utc = np.mod(jd - 0.5, 1.0) * 1440.0
    tst = np.mod(minutes_utc + eot_min + 4.0 * longitude_deg, 1440.0)
    hour_angle = tst / 4.0 - 180.0

    lat = math.radians(latitude_deg)
    dec = np.radians(declination)
    cos_zen = np.clip(
        math.sin(lat) * np.sin(dec) + math.cos(lat) * np.cos(dec) * np.cos(np.radians(hour_angle)),
        -1.0,
        1.0,
    )
    zenith = np.degrees(np.arccos(cos_zen))

    sin_zen = np.sin(np.radians(zenith))
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = (math.sin(lat) * cos_zen - np.sin(dec)) / (math.cos(lat) * sin_zen)
    arg = np.clip(np.nan_to_num(arg, nan=1.0), -1.0, 1.0)
    base = np.degrees(np.arccos(arg))
    azimuth = np.where(hour_angle > 0.0, np.mod(base + 180.0, 360.0), np.mod(540.0 - base, 360.0))
    return zenith, azimuth, declination


def solar_position(ts: datetime, latitude_deg: float, longitude_deg: float) -> tuple[float, float]:
    """Sun zenith and azimuth in degrees (azimuth clockwise from north)."""
    if abs(latitude_deg) > 90:
        raise InvalidParameterError(f"latitude {latitude_deg} outside [-90, 90]")
    jd = np.asarray([_julian_day(ts)])
    zenith, azimuth, _ = _position_arrays(jd, latitude_deg, longitude_deg)
    return float(zenith[0]), float(azimuth[0])


def solar_declination_deg(ts: datetime) -> float:
    """Sun declination in degrees for the given instant."""
    jd = np.asarray([_julian_day(ts)])
    _, _, declination = _position_arrays(jd, 0.0, 0.0)
    return float(declination[0])


# ---------------------------------------------------------------------------
# Weather series

@dataclass(frozen=True)
class WeatherRecord:
    timestamp: datetime
    ghi: float
    dni: float
    dhi: float
    temp_air: float
    wind_speed: float


class WeatherSeries:
    """Validated time-ordered weather records backed by numpy arrays."""

    def __init__(self, records: Sequence[WeatherRecord]):
        if not records:
            raise ValidationError("weather series is empty")
        prev: Optional[datetime] = None
        for i, rec in enumerate(records):
            if rec.timestamp.tzinfo is None:
                raise ValidationError(f"record {i}: timestamp must be offset-aware")
            if min(rec.ghi, rec.dni, rec.dhi) < 0:
                raise ValidationError(f"record {i}: negative irradiance")
            if prev is not None and rec.timestamp <= prev:
                raise ValidationError(
                    f"record {i}: timestamp {rec.timestamp.isoformat()} not strictly increasing"
                )
            prev = rec.timestamp
        self.timestamps: tuple[datetime, ...] = tuple(r.timestamp for r in records)
        self.ghi = np.array([r.ghi for r in records], dtype=float)
        self.dni = np.array([r.dni for r in records], dtype=float)
        self.dhi = np.array([r.dhi for r in records], dtype=float)
        self.temp_air = np.array([r.temp_air for r in records], dtype=float)
        self.wind_speed = np.array([r.wind_speed for r in records], dtype=float)

    def __len__(self) -> int:
        return len(self.timestamps)

    def records(self) -> Iterable[WeatherRecord]:
        for i, ts in enumerate(self.timestamps):
            yield WeatherRecord(
                timestamp=ts,
                ghi=float(self.ghi[i]),
                dni=float(self.dni[i]),
                dhi=float(self.dhi[i]),
                temp_air=float(self.temp_air[i]),
                wind_speed=float(self.wind_speed[i]),
            )

    def step(self) -> timedelta:
        if len(self.timestamps) < 2:
            raise ValidationError("cannot infer step from a single record")
        return min(
            (b - a) for a, b in zip(self.timestamps[:-1], self.timestamps[1:])
        )


def load_weather(path: str | Path) -> WeatherSeries:
    """Read a weather CSV with the exact header
    timestamp,ghi,dni,dhi,temp_air,wind_speed."""
    path = Path(path)
    records: list[WeatherRecord] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != WEATHER_COLUMNS:
            raise SchemaError(
                f"{path} line 1: header must be {','.join(WEATHER_COLUMNS)}, got {','.join(header)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(WEATHER_COLUMNS):
                raise SchemaError(f"{path} line {lineno}: expected {len(WEATHER_COLUMNS)} fields")
            try:
                ts = datetime.fromisoformat(row[0])
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise SchemaError(f"{path} line {lineno}: {exc}") from exc
            if ts.tzinfo is None:
                raise SchemaError(f"{path} line {lineno}: timestamp must carry a UTC offset")
            if min(values[0], values[1], values[2]) < 0:
                raise ValidationError(f"{path} line {lineno}: negative irradiance")
            if records and ts <= records[-1].timestamp:
                raise ValidationError(
                    f"{path} line {lineno}: timestamp {row[0]} not strictly increasing"
                )
            records.append(WeatherRecord(ts, *values))
    return WeatherSeries(records)


def save_weather(series: WeatherSeries, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(WEATHER_COLUMNS)
        for rec in series.records():
            writer.writerow(
                [
                    rec.timestamp.isoformat(),
                    repr(rec.ghi),
                    repr(rec.dni),
                    repr(rec.dhi),
                    repr(rec.temp_air),
                    repr(rec.wind_speed),
                ]
            )


# ---------------------------------------------------------------------------
# Irradiance, temperature, power

@dataclass(frozen=True)
class Orientation:
    tilt_deg: float
    azimuth_deg: float  # 180 = equator-facing in the northern hemisphere

    def validate(self) -> None:
        if not 0.0 <= self.tilt_deg <= 90.0:
            raise ValidationError(f"tilt {self.tilt_deg} outside [0, 90]")
        if not 0.0 <= self.azimuth_deg < 360.0:
            raise ValidationError(f"azimuth {self.azimuth_deg} outside [0, 360)")


def _poa_components(ghi, dni, dhi, zenith_deg, azimuth_deg, tilt_deg, surface_azimuth_deg, albedo):
    zen = np.radians(zenith_deg)
    tilt = np.radians(tilt_deg)
    cos_inc = np.cos(zen) * np.cos(tilt) + np.sin(zen) * np.sin(tilt) * np.cos(
        np.radians(azimuth_deg - surface_azimuth_deg)
    )
    beam = dni * np.maximum(0.0, cos_inc)
    diffuse = dhi * (1.0 + np.cos(tilt)) / 2.0
    ground = ghi * albedo * (1.0 - np.cos(tilt)) / 2.0
    return beam + diffuse + ground


def poa_irradiance(
    rec: WeatherRecord,
    sun: tuple[float, float],
    orientation: Orientation,
    albedo: float = DEFAULT_ALBEDO,
) -> float:
    """Plane-of-array irradiance in W/m2: clipped beam + isotropic diffuse
    + ground reflection."""
    orientation.validate()
    zenith_deg, azimuth_deg = sun
    value = _poa_components(
        rec.ghi, rec.dni, rec.dhi, zenith_deg, azimuth_deg,
        orientation.tilt_deg, orientation.azimuth_deg, albedo,
    )
    return float(value)


def cell_temperature(poa: float, temp_air: float, noct_c: float = DEFAULT_NOCT_C):
    """NOCT linear model: cell = air + (NOCT - 20) / 800 * POA."""
    return temp_air + (noct_c - 20.0) / 800.0 * poa


def dc_power(
    poa,
    t_cell,
    panel: PanelSpec,
    gamma: float = DEFAULT_GAMMA_PER_C,
    derate: float = DEFAULT_SYSTEM_DERATE,
):
    """Temperature-corrected DC output in watts, clamped at zero."""
    power = panel.rated_power_w * (poa / 1000.0) * (1.0 + gamma * (t_cell - 25.0)) * derate
    return np.maximum(0.0, power)


# ---------------------------------------------------------------------------
# Surface configurations and annual yield

@dataclass(frozen=True)
class SurfaceConfig:
    """One of the 18 simulated surfaces: category x BIPV type."""

    category: BuildingCategory
    bipv_type: BipvType
    orientations: tuple[tuple[Orientation, float], ...]
    noct_c: float = DEFAULT_NOCT_C
    gamma_per_c: float = DEFAULT_GAMMA_PER_C
    system_derate: float = DEFAULT_SYSTEM_DERATE
    albedo: float = DEFAULT_ALBEDO

    def validate(self) -> None:
        if not self.orientations:
            raise ValidationError("surface has no orientations")
        total = 0.0
        for orientation, weight in self.orientations:
            orientation.validate()
            if weight <= 0:
                raise ValidationError(f"orientation weight {weight} must be > 0")
            total += weight
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"orientation weights sum to {total}, expected 1")


def default_surface_configs(latitude_deg: float, **model_params) -> dict[Cell, SurfaceConfig]:
    """Rooftop at latitude tilt facing the equator; facades and windows
    vertical facing the equator.  Non-sunlit facade area never reaches this
    model (it is excluded upstream by the usable-fraction factor)."""
    equator_facing = 180.0 if latitude_deg >= 0 else 0.0
    rooftop = Orientation(tilt_deg=min(abs(latitude_deg), 90.0), azimuth_deg=equator_facing)
    vertical = Orientation(tilt_deg=90.0, azimuth_deg=equator_facing)
    configs = {}
    for cat, bipv_type in all_cells():
        orientation = rooftop if bipv_type == BipvType.ROOFTOP else vertical
        configs[(cat, bipv_type)] = SurfaceConfig(
            category=cat,
            bipv_type=bipv_type,
            orientations=((orientation, 1.0),),
            **model_params,
        )
    return configs


@dataclass(frozen=True)
class YieldResult:
    kwh_per_panel_yr: float
    kwh_per_kwp_yr: float
    hourly_w: Optional[np.ndarray] = field(default=None, compare=False)


MAX_GAP_STEPS = 3


def _check_coverage(series: WeatherSeries) -> float:
    """Validate year coverage and gap sizes; returns the step in hours."""
    step = series.step()
    span = series.timestamps[-1] - series.timestamps[0]
    if span < timedelta(days=365) - step:
        raise ValidationError(
            f"weather series spans {span}, which is less than one full year"
        )
    for i, (a, b) in enumerate(zip(series.timestamps[:-1], series.timestamps[1:])):
        missing = round((b - a) / step) - 1
        if missing > MAX_GAP_STEPS:
            raise ValidationError(
                f"gap of {missing} steps after record {i} ({a.isoformat()}) exceeds {MAX_GAP_STEPS}"
            )
        if missing > 0:
            log.warning(
                "gap of %d steps after %s filled with zero generation", missing, a.isoformat()
            )
    return step.total_seconds() / 3600.0


def annual_yield(
    series: WeatherSeries,
    cfg: SurfaceConfig,
    panel: PanelSpec,
    latitude_deg: float,
    longitude_deg: float,
    keep_trace: bool = False,
) -> YieldResult:
    """Integrate per-panel DC energy over a year of weather.

    The yield of a weighted orientation mix is the weighted sum of the
    single-orientation yields, exactly.
    """
    cfg.validate()
    step_hours = _check_coverage(series)
    jd = np.array([_julian_day(ts) for ts in series.timestamps])
    zenith, azimuth, _ = _position_arrays(jd, latitude_deg, longitude_deg)

    kwh = 0.0
    trace = np.zeros(len(series)) if keep_trace else None
    for orientation, weight in cfg.orientations:
        poa = _poa_components(
            series.ghi, series.dni, series.dhi, zenith, azimuth,
            orientation.tilt_deg, orientation.azimuth_deg, cfg.albedo,
        )
        t_cell = cell_temperature(poa, series.temp_air, cfg.noct_c)
        power = dc_power(poa, t_cell, panel, cfg.gamma_per_c, cfg.system_derate)
        kwh += weight * float(power.sum() * step_hours / 1000.0)
        if trace is not None:
            trace = trace + weight * power
    return YieldResult(
        kwh_per_panel_yr=kwh,
        kwh_per_kwp_yr=kwh / (panel.rated_power_w / 1000.0),
        hourly_w=trace,
    )
