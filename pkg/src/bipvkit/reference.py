"""Published Zibo case-study reference values.

These are the city-scale figures reported for Zibo (Shandong, China):
segmented rooftop areas per category, the panel counts implied by the
default conversion factors and panel footprint, reported annual generation
for selected configurations, the full yearly carbon-reduction table, and
the city's electricity consumption.  They anchor regression tests and the
demo scripts; none of them are inputs to the computation itself.
"""

from __future__ import annotations

from .bipv import BipvType
from .dataset import BuildingCategory

_A = BuildingCategory.APARTMENT
_H = BuildingCategory.HOUSE
_C = BuildingCategory.CENTER_BUILDING
_F = BuildingCategory.FACTORY
_R = BuildingCategory.HIGH_RISE_BUILDING
_O = BuildingCategory.OTHERS

_RT = BipvType.ROOFTOP
_FA = BipvType.FACADE
_WI = BipvType.WINDOW

# Segmented rooftop area per category, m2.
ZIBO_ROOFTOP_AREA_M2: dict[BuildingCategory, float] = {
    _A: 56_194_238.0,
    _H: 32_877_425.0,
    _C: 44_583_152.0,
    _F: 82_321_505.0,
    _R: 9_843_321.0,
    _O: 86_554_648.0,
}

# Installable panel counts per (category, BIPV type).
ZIBO_PANEL_COUNTS: dict[tuple[BuildingCategory, BipvType], int] = {
    (_A, _RT): 15_512_043, (_A, _FA): 49_767_805, (_A, _WI): 465_361,
    (_H, _RT): 10_588_191, (_H, _FA): 6_352_915, (_H, _WI): 326_721,
    (_C, _RT): 13_332_454, (_C, _FA): 12_922_224, (_C, _WI): 615_343,
    (_F, _RT): 30_299_067, (_F, _FA): 19_694_393, (_F, _WI): 181_794,
    (_R, _RT): 2_264_319, (_R, _FA): 13_151_164, (_R, _WI): 285_304,
    (_O, _RT): 15_928_554, (_O, _FA): 6_570_528, (_O, _WI): 238_928,
}

# Reported annual generation for selected configurations, TWh (2022 weather).
ZIBO_ANNUAL_ENERGY_TWH: dict[tuple[BuildingCategory, BipvType], float] = {
    (_F, _RT): 18.18,
    (_A, _RT): 9.31,
    (_O, _RT): 9.56,
    (_A, _FA): 17.92,
    (_R, _FA): 4.34,
}

# Yearly carbon-emission reduction per cell, units of 1e7 t CO2.
ZIBO_CER_1E7_T: dict[tuple[BuildingCategory, BipvType], float] = {
    (_A, _RT): 0.6366, (_A, _FA): 1.2254, (_A, _WI): 0.0116,
    (_H, _RT): 0.4342, (_H, _FA): 0.2605, (_H, _WI): 0.0096,
    (_C, _RT): 0.5470, (_C, _FA): 0.4773, (_C, _WI): 0.0171,
    (_F, _RT): 1.2431, (_F, _FA): 0.8889, (_F, _WI): 0.0075,
    (_R, _RT): 0.0930, (_R, _FA): 0.2968, (_R, _WI): 0.0062,
    (_O, _RT): 0.6537, (_O, _FA): 0.2694, (_O, _WI): 0.0068,
}

# Reported annual totals, TWh.
ZIBO_TOTAL_GENERATION_TWH = {2022: 103.59}
ZIBO_CONSUMPTION_TWH = {2013: 32.84, 2022: 41.63}

# Best prompt template and the IoU it attained on the labeled Zibo subset
# (fractions; reported on a percent scale).  Reference values only: the
# labeled subset is not distributed, so these are not test oracles.
ZIBO_BEST_PROMPT: dict[BuildingCategory, str] = {
    _A: "TP4",
    _H: "TP4",
    _C: "TP4",
    _F: "TP6",
    _R: "TP5",
}
ZIBO_BEST_PROMPT_IOU: dict[BuildingCategory, float] = {
    _A: 0.362,
    _H: 0.286,
    _C: 0.302,
    _F: 0.312,
    _R: 0.311,
}

# Box-threshold optimum reported for the labeled subset.
ZIBO_OPTIMAL_BOX_THRESHOLD = 0.25

# Dataset-scale metadata: tile count and per-tile ground coverage.
ZIBO_TILE_COUNT = 149_420
ZIBO_TILE_AREA_M2 = 39_920.0
ZIBO_TILE_PPI = 196.0
ZIBO_TILE_SCALE_DENOMINATOR = 1110.0

# Site coordinates used by the shipped configs.
ZIBO_LATITUDE_DEG = 36.8
ZIBO_LONGITUDE_DEG = 118.05
