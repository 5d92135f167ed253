"""Installable PV area, panel counts, and capacity per BIPV configuration.

Rooftop area per category is mapped to the area actually available for
panels (AAPV) through two per-cell factors: the surface-to-rooftop area
ratio and a correction factor that excludes obstructed or non-sunlit
surface.  Panel counts then follow from the panel's geometric footprint.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from .areas import CategoryAreas
from .dataset import BuildingCategory
from .errors import InvalidParameterError, MissingInputError, ValidationError

log = logging.getLogger(__name__)


class BipvType(Enum):
    ROOFTOP = "rooftop"
    FACADE = "facade"
    WINDOW = "window"

    @classmethod
    def from_key(cls, key: str) -> "BipvType":
        try:
            return cls(key)
        except ValueError:
            raise InvalidParameterError(f"unknown BIPV type {key!r}") from None


Cell = tuple[BuildingCategory, BipvType]


def all_cells() -> tuple[Cell, ...]:
    """The 18 (category, BIPV type) cells in deterministic report order."""
    return tuple((c, b) for c in BuildingCategory for b in BipvType)


@dataclass(frozen=True)
class FactorCell:
    """Surface-to-rooftop area ratio and usable-fraction correction."""

    a_over_ra: float
    k_mapping: float

    def validate(self) -> None:
        if self.a_over_ra <= 0:
            raise ValidationError(f"a_over_ra must be > 0, got {self.a_over_ra}")
        if not 0 < self.k_mapping <= 1:
            raise ValidationError(f"k_mapping must be in (0, 1], got {self.k_mapping}")


@dataclass(frozen=True)
class BipvFactors:
    cells: dict[Cell, FactorCell]

    def validate(self) -> None:
        for cell in all_cells():
            if cell not in self.cells:
                cat, b = cell
                raise MissingInputError(f"factor table missing cell ({cat.key}, {b.value})")
        for fc in self.cells.values():
            fc.validate()

    def cell(self, category: BuildingCategory, bipv_type: BipvType) -> FactorCell:
        try:
            return self.cells[(category, bipv_type)]
        except KeyError:
            raise MissingInputError(
                f"factor table missing cell ({category.key}, {bipv_type.value})"
            ) from None


# Default conversion factors for the Zibo building stock, per
# (category, BIPV type): (surface/rooftop ratio, usable fraction).
_DEFAULT_FACTOR_ROWS = {
    BuildingCategory.APARTMENT: ((1.0, 0.6), (5.5, 0.35), (0.18, 0.10)),
    BuildingCategory.HOUSE: ((1.0, 0.7), (1.4, 0.30), (0.12, 0.18)),
    BuildingCategory.CENTER_BUILDING: ((1.0, 0.65), (1.8, 0.35), (0.25, 0.12)),
    BuildingCategory.FACTORY: ((1.0, 0.8), (1.3, 0.40), (0.08, 0.06)),
    BuildingCategory.HIGH_RISE_BUILDING: ((1.0, 0.5), (12.1, 0.24), (0.35, 0.18)),
    BuildingCategory.OTHERS: ((1.0, 0.4), (1.1, 0.15), (0.20, 0.03)),
}


def default_factors() -> BipvFactors:
    cells = {}
    for cat, row in _DEFAULT_FACTOR_ROWS.items():
        for bipv_type, (ratio, k) in zip(BipvType, row):
            cells[(cat, bipv_type)] = FactorCell(a_over_ra=ratio, k_mapping=k)
    return BipvFactors(cells=cells)


@dataclass(frozen=True)
class PanelSpec:
    """Commercial module datasheet values plus the rated power actually used.

    The shipped datasheet lists a nameplate maximum power that is wildly
    inconsistent with V_mp x I_mp; ``rated_power_w`` defaults to the
    electrical product and a warning is logged when the nameplate disagrees
    with it by more than 5%.
    """

    length_m: float = 2.094
    width_m: float = 1.038
    depth_m: float = 0.035
    weight_kg: float = 27.5
    installation_area_m2: float = 2.23
    p_max_w: float = 46.3
    v_mp_v: float = 41.0
    i_mp_a: float = 11.45
    temp_min_c: float = -40.0
    temp_max_c: float = 85.0
    rated_power_w: float = 0.0  # 0 means "use v_mp * i_mp"

    def __post_init__(self):
        if self.rated_power_w <= 0:
            object.__setattr__(self, "rated_power_w", self.v_mp_v * self.i_mp_a)

    @property
    def footprint_m2(self) -> float:
        """Geometric footprint used as the panel-count divisor."""
        return self.length_m * self.width_m

    def validate(self) -> None:
        if self.length_m <= 0 or self.width_m <= 0:
            raise ValidationError("panel dimensions must be > 0")
        if self.rated_power_w <= 0:
            raise ValidationError("rated_power_w must be > 0")
        electrical = self.v_mp_v * self.i_mp_a
        if electrical > 0 and abs(self.p_max_w - electrical) / electrical > 0.05:
            log.warning(
                "panel nameplate %.1f W is inconsistent with V_mp x I_mp = %.2f W; "
                "using rated_power_w = %.2f W",
                self.p_max_w,
                electrical,
                self.rated_power_w,
            )


def aapv(areas: CategoryAreas, factors: BipvFactors) -> dict[Cell, float]:
    """Area available for PV per cell: A_i * (A/RA) * K_mapping."""
    factors.validate()
    out: dict[Cell, float] = {}
    for cat, bipv_type in all_cells():
        fc = factors.cell(cat, bipv_type)
        out[(cat, bipv_type)] = areas.area_m2.get(cat, 0.0) * fc.a_over_ra * fc.k_mapping
    return out


def panel_count(aapv_m2: float, panel: PanelSpec) -> int:
    """Whole panels fitting in the available area, by geometric footprint."""
    if aapv_m2 < 0:
        raise InvalidParameterError(f"aapv must be >= 0, got {aapv_m2}")
    return int(aapv_m2 // panel.footprint_m2)


def capacity(count: int, panel: PanelSpec) -> float:
    """Installed DC capacity in watts: panel count times rated power."""
    if count < 0:
        raise InvalidParameterError(f"panel count must be >= 0, got {count}")
    return count * panel.rated_power_w


@dataclass(frozen=True)
class InstallCell:
    aapv_m2: float
    panel_count: int
    capacity_w: float


@dataclass(frozen=True)
class InstallPlan:
    cells: dict[Cell, InstallCell]

    def cell(self, category: BuildingCategory, bipv_type: BipvType) -> InstallCell:
        try:
            return self.cells[(category, bipv_type)]
        except KeyError:
            raise MissingInputError(
                f"install plan missing cell ({category.key}, {bipv_type.value})"
            ) from None

    @property
    def total_panels(self) -> int:
        return sum(c.panel_count for c in self.cells.values())

    @property
    def total_capacity_w(self) -> float:
        return sum(c.capacity_w for c in self.cells.values())


def build_install_plan(areas: CategoryAreas, factors: BipvFactors, panel: PanelSpec) -> InstallPlan:
    panel.validate()
    available = aapv(areas, factors)
    cells = {}
    for cell, area_m2 in available.items():
        count = panel_count(area_m2, panel)
        cells[cell] = InstallCell(aapv_m2=area_m2, panel_count=count, capacity_w=capacity(count, panel))
    return InstallPlan(cells=cells)
