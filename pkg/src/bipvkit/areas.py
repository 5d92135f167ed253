"""Rooftop areas per building category from masked pixel counts.

The five named categories are measured directly from their masks; Others is
the residual of the all-buildings mask after subtracting the named pixel
counts, clamped at zero per tile so local prompt overlap cannot produce
negative area or contaminate other tiles.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .dataset import BuildingCategory, DatasetManifest, NAMED_CATEGORIES
from .errors import InvalidParameterError
from .masks import ALL_BUILDINGS, TilePrediction, filter_by_threshold, pixel_count, union_mask

log = logging.getLogger(__name__)

Thresholds = Union[float, Mapping[Union[BuildingCategory, str], float]]


@dataclass(frozen=True)
class CategoryAreas:
    """City-wide rooftop area per category plus the all-buildings total."""

    area_m2: dict[BuildingCategory, float]
    all_buildings_m2: float = 0.0
    overlap_warnings: int = 0

    def __add__(self, other: "CategoryAreas") -> "CategoryAreas":
        merged = {c: self.area_m2.get(c, 0.0) + other.area_m2.get(c, 0.0) for c in BuildingCategory}
        return CategoryAreas(
            area_m2=merged,
            all_buildings_m2=self.all_buildings_m2 + other.all_buildings_m2,
            overlap_warnings=self.overlap_warnings + other.overlap_warnings,
        )

    @classmethod
    def zero(cls) -> "CategoryAreas":
        return cls(area_m2={c: 0.0 for c in BuildingCategory})


def category_area(pixels: int, s: float) -> float:
    """Convert a foreground pixel count to square meters: pixels * S."""
    if pixels < 0:
        raise InvalidParameterError(f"pixel count must be >= 0, got {pixels}")
    if s <= 0:
        raise InvalidParameterError(f"pixel area S must be > 0, got {s}")
    return pixels * s


def others_area(all_buildings_px: int, category_px: Sequence[int], s: float) -> float:
    """Residual roof area: (all-buildings pixels - named-category pixels) * S.

    A negative residual means the named masks overlap each other or spill
    outside the all-buildings mask; it is clamped to zero and logged.
    """
    if all_buildings_px < 0 or any(p < 0 for p in category_px):
        raise InvalidParameterError("pixel counts must be >= 0")
    residual = all_buildings_px - sum(category_px)
    if residual < 0:
        log.warning(
            "others residual clamped: named categories cover %d px beyond the "
            "all-buildings mask (%d px)",
            -residual,
            all_buildings_px,
        )
        residual = 0
    return category_area(residual, s)


def tile_areas(pred: TilePrediction, s: float, thresholds: Thresholds) -> CategoryAreas:
    """Apply thresholds and the residual rule to a single tile."""
    area: dict[BuildingCategory, float] = {c: 0.0 for c in BuildingCategory}
    named_px: dict[BuildingCategory, int] = {}
    for cat in NAMED_CATEGORIES:
        kept = filter_by_threshold(pred, _threshold_for(thresholds, cat)).for_category(cat)
        named_px[cat] = pixel_count(union_mask([i.mask for i in kept])) if kept else 0
        area[cat] = category_area(named_px[cat], s)
    all_kept = filter_by_threshold(pred, _threshold_for(thresholds, ALL_BUILDINGS)).for_category(
        ALL_BUILDINGS
    )
    all_px = pixel_count(union_mask([i.mask for i in all_kept])) if all_kept else 0
    counts = [named_px[c] for c in NAMED_CATEGORIES]
    residual = all_px - sum(counts)
    area[BuildingCategory.OTHERS] = others_area(all_px, counts, s)
    return CategoryAreas(
        area_m2=area,
        all_buildings_m2=category_area(all_px, s),
        overlap_warnings=1 if residual < 0 else 0,
    )


def _threshold_for(thresholds: Thresholds, key: Union[BuildingCategory, str]) -> float:
    if isinstance(thresholds, Mapping):
        if key in thresholds:
            return thresholds[key]
        if "default" in thresholds:
            return thresholds["default"]
        raise InvalidParameterError(f"no threshold configured for {key!r}")
    return float(thresholds)


def aggregate_areas(
    predictions: Iterable[TilePrediction],
    manifest: DatasetManifest,
    thresholds: Thresholds,
    jobs: int = 1,
) -> CategoryAreas:
    """Sum per-tile areas over the dataset; associative and order-independent.

    Each tile contributes through its own pixel-area factor S, and the
    Others residual is clamped per tile before summation.
    """
    preds = sorted(predictions, key=lambda p: p.tile_id)
    for p in preds:
        manifest.tile(p.tile_id)  # raises for tiles missing from the manifest

    def one(pred: TilePrediction) -> CategoryAreas:
        return tile_areas(pred, manifest.tile(pred.tile_id).pixel_area_m2, thresholds)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(one, preds))
    else:
        parts = [one(p) for p in preds]
    total = CategoryAreas.zero()
    for part in parts:
        total = total + part
    return total
