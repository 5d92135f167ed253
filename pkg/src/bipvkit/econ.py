"""Lifetime cost, levelized cost of electricity, and carbon reduction.

Costs are quoted per watt of installed capacity per year; the LCOE
numerator scales the discounted per-watt cost stream by the installed
capacity, the denominator discounts the annual energy stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from .errors import InvalidParameterError, UndefinedLcoeError, ValidationError

# Grid displacement factor, kg CO2 per kWh (Chinese national grid figure).
DEFAULT_EMISSION_FACTOR = 0.6838

DEFAULT_DISCOUNT_RATE = 0.05
DEFAULT_HORIZON_YEARS = 25
DEFAULT_DEGRADATION_PER_YEAR = 0.005


@dataclass(frozen=True)
class CostModel:
    """Per-watt cost triple for one (category, BIPV type) cell.

    c_start: initial hardware + installation, CNY/W (year 1 only).
    c_om: operations and maintenance, CNY/W/yr.
    c_rent: surface rent (roof, wall, or window), CNY/W/yr.
    """

    c_start: float
    c_om: float
    c_rent: float

    def validate(self) -> None:
        if min(self.c_start, self.c_om, self.c_rent) < 0:
            raise ValidationError("cost components must be >= 0")


@dataclass(frozen=True)
class LcoeParams:
    discount_rate: float = DEFAULT_DISCOUNT_RATE
    horizon_years: int = DEFAULT_HORIZON_YEARS
    degradation_per_year: float = DEFAULT_DEGRADATION_PER_YEAR

    def validate(self) -> None:
        if self.discount_rate < 0:
            raise ValidationError(f"discount rate must be >= 0, got {self.discount_rate}")
        if self.horizon_years < 1:
            raise ValidationError(f"horizon must be >= 1 year, got {self.horizon_years}")
        if not 0 <= self.degradation_per_year < 1:
            raise ValidationError(
                f"degradation must be in [0, 1), got {self.degradation_per_year}"
            )


@dataclass(frozen=True)
class GenerationSeries:
    """Annual energy in kWh for years t = 1..n."""

    e_t: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "e_t", tuple(float(e) for e in self.e_t))
        if not self.e_t:
            raise ValidationError("generation series is empty")
        if any(e < 0 for e in self.e_t):
            raise ValidationError("generation series has negative entries")

    @property
    def n(self) -> int:
        return len(self.e_t)


def annual_cost(cm: CostModel, t: int) -> float:
    """Per-watt cost in year t: start-up costs land entirely in year 1."""
    if t < 1:
        raise InvalidParameterError(f"year index must be >= 1, got {t}")
    if t == 1:
        return cm.c_start + cm.c_om + cm.c_rent
    return cm.c_om + cm.c_rent


def generation_series(first_year_kwh: float, degradation_per_year: float, n: int) -> GenerationSeries:
    """Geometric output decay: e_t = first_year * (1 - d)^(t-1)."""
    if first_year_kwh < 0:
        raise InvalidParameterError(f"first-year energy must be >= 0, got {first_year_kwh}")
    if not 0 <= degradation_per_year < 1:
        raise InvalidParameterError(
            f"degradation must be in [0, 1), got {degradation_per_year}"
        )
    if n < 1:
        raise InvalidParameterError(f"series length must be >= 1, got {n}")
    return GenerationSeries(
        e_t=tuple(first_year_kwh * (1.0 - degradation_per_year) ** (t - 1) for t in range(1, n + 1))
    )


def lcoe(cm: CostModel, capacity_w: float, series: GenerationSeries, params: LcoeParams) -> float:
    """Levelized cost in CNY/kWh over the parameter horizon.

    Discounted per-watt costs are scaled by capacity; discounted energy uses
    the generation series for t = 1..n.  Homogeneous of degree zero when
    energy scales with capacity.
    """
    cm.validate()
    params.validate()
    if capacity_w < 0:
        raise InvalidParameterError(f"capacity must be >= 0, got {capacity_w}")
    if series.n < params.horizon_years:
        raise ValidationError(
            f"generation series has {series.n} years, horizon needs {params.horizon_years}"
        )
    r = params.discount_rate
    cost = 0.0
    energy = 0.0
    for t in range(1, params.horizon_years + 1):
        discount = (1.0 + r) ** t
        cost += annual_cost(cm, t) / discount
        energy += series.e_t[t - 1] / discount
    if energy <= 0.0:
        raise UndefinedLcoeError("discounted lifetime energy is zero")
    return cost * capacity_w / energy


def cer(e_pv_kwh: float, ef: float = DEFAULT_EMISSION_FACTOR) -> float:
    """Carbon emission reduction in kg CO2: displaced energy times factor."""
    if e_pv_kwh < 0:
        raise InvalidParameterError(f"energy must be >= 0, got {e_pv_kwh}")
    if ef <= 0:
        raise InvalidParameterError(f"emission factor must be > 0, got {ef}")
    return e_pv_kwh * ef
