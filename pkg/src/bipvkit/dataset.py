"""Dataset manifest, building-category taxonomy, and pixel-to-area scale math.

A tile is a square crop of georeferenced satellite imagery with a known
print resolution (PPI) and map scale.  One pixel therefore covers a fixed
ground area ``S = (scale_denominator * 0.0254 / ppi)**2`` square meters,
which is the factor every downstream area computation multiplies by.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Iterable, Optional

from .errors import InvalidParameterError, SchemaError, ValidationError

log = logging.getLogger(__name__)

METERS_PER_INCH = 0.0254

# Relative slack allowed between computed tile area and the metadata's
# declared area (declared values are rounded upstream).
DECLARED_AREA_TOLERANCE = 0.02


class BuildingCategory(IntEnum):
    """Six building categories with stable codes 1..6.

    Code 6 (Others) is the subtraction category: its pixels are whatever the
    all-buildings mask covers that none of the five named categories claim.
    """

    APARTMENT = 1
    HOUSE = 2
    CENTER_BUILDING = 3
    FACTORY = 4
    HIGH_RISE_BUILDING = 5
    OTHERS = 6

    @property
    def key(self) -> str:
        """Compact name used in config files and CSV output."""
        return _CATEGORY_KEYS[self]

    @property
    def display_name(self) -> str:
        """Human-readable name, suitable for prompt text."""
        return _CATEGORY_DISPLAY[self]

    @classmethod
    def from_key(cls, key: str) -> "BuildingCategory":
        for cat, k in _CATEGORY_KEYS.items():
            if k == key:
                return cat
        raise InvalidParameterError(f"unknown building category {key!r}")


_CATEGORY_KEYS = {
    BuildingCategory.APARTMENT: "Apartment",
    BuildingCategory.HOUSE: "House",
    BuildingCategory.CENTER_BUILDING: "CenterBuilding",
    BuildingCategory.FACTORY: "Factory",
    BuildingCategory.HIGH_RISE_BUILDING: "HighRiseBuilding",
    BuildingCategory.OTHERS: "Others",
}

_CATEGORY_DISPLAY = {
    BuildingCategory.APARTMENT: "Apartment",
    BuildingCategory.HOUSE: "House",
    BuildingCategory.CENTER_BUILDING: "Center building",
    BuildingCategory.FACTORY: "Factory",
    BuildingCategory.HIGH_RISE_BUILDING: "High-rise building",
    BuildingCategory.OTHERS: "Others",
}

# The five categories segmented directly (Others is derived by subtraction).
NAMED_CATEGORIES = tuple(c for c in BuildingCategory if c != BuildingCategory.OTHERS)


def pixel_area(scale_denominator: float, ppi: float) -> float:
    """Ground area covered by one pixel, in square meters.

    One image inch holds ``ppi`` pixels and represents ``scale_denominator``
    real-world inches, so one pixel spans ``scale_denominator * 0.0254 / ppi``
    meters on the ground; the area is that squared.
    """
    if scale_denominator <= 0:
        raise InvalidParameterError(f"scale_denominator must be > 0, got {scale_denominator}")
    if ppi <= 0:
        raise InvalidParameterError(f"ppi must be > 0, got {ppi}")
    side_m = scale_denominator * METERS_PER_INCH / ppi
    return side_m * side_m


@dataclass(frozen=True)
class TileMeta:
    """Geometry and scale metadata for one imagery tile."""

    tile_id: str
    width_px: int
    height_px: int
    ppi: float
    scale_denominator: float
    lens_height_m: Optional[float] = None
    declared_area_m2: Optional[float] = None

    @property
    def pixel_area_m2(self) -> float:
        return pixel_area(self.scale_denominator, self.ppi)

    @property
    def area_m2(self) -> float:
        """Tile ground area; prefers the declared value when present."""
        if self.declared_area_m2 is not None:
            return self.declared_area_m2
        return self.width_px * self.height_px * self.pixel_area_m2

    def validate(self) -> None:
        if not self.tile_id:
            raise ValidationError("tile_id must be non-empty")
        if self.width_px < 1 or self.height_px < 1:
            raise ValidationError(f"tile {self.tile_id}: pixel dimensions must be >= 1")
        if self.ppi <= 0:
            raise ValidationError(f"tile {self.tile_id}: ppi must be > 0, got {self.ppi}")
        if self.scale_denominator <= 0:
            raise ValidationError(
                f"tile {self.tile_id}: scale_denominator must be > 0, got {self.scale_denominator}"
            )
        if self.declared_area_m2 is not None:
            computed = self.width_px * self.height_px * self.pixel_area_m2
            rel = abs(computed - self.declared_area_m2) / self.declared_area_m2
            if rel > DECLARED_AREA_TOLERANCE:
                raise ValidationError(
                    f"tile {self.tile_id}: computed area {computed:.1f} m2 deviates "
                    f"{rel:.1%} from declared {self.declared_area_m2:.1f} m2 "
                    f"(tolerance {DECLARED_AREA_TOLERANCE:.0%})"
                )


@dataclass(frozen=True)
class DatasetManifest:
    """A named collection of tiles, optionally carrying segmentation labels."""

    name: str
    labeled: bool
    tiles: tuple[TileMeta, ...] = field(default_factory=tuple)

    def validate(self) -> None:
        if not self.tiles:
            raise ValidationError(f"manifest {self.name!r} has no tiles")
        seen: set[str] = set()
        for tile in self.tiles:
            if tile.tile_id in seen:
                raise SchemaError(f"duplicate tile_id {tile.tile_id!r} in manifest {self.name!r}")
            seen.add(tile.tile_id)
            tile.validate()

    def tile(self, tile_id: str) -> TileMeta:
        for t in self.tiles:
            if t.tile_id == tile_id:
                return t
        raise ValidationError(f"tile {tile_id!r} not in manifest {self.name!r}")

    @property
    def tile_ids(self) -> tuple[str, ...]:
        return tuple(t.tile_id for t in self.tiles)


_TILE_KEYS = {
    "tile_id",
    "width_px",
    "height_px",
    "ppi",
    "scale_denominator",
    "lens_height_m",
    "declared_area_m2",
}
_MANIFEST_KEYS = {"name", "labeled", "tiles"}


def _check_keys(obj: dict, allowed: set[str], where: str, strict: bool) -> None:
    unknown = set(obj) - allowed
    if not unknown:
        return
    msg = f"unknown keys {sorted(unknown)} in {where}"
    if strict:
        raise SchemaError(msg)
    log.warning("%s (ignored)", msg)


def load_manifest(path: str | Path, strict: bool = False) -> DatasetManifest:
    """Load and validate a manifest JSON document.

    With ``strict=True`` unknown keys are rejected; otherwise they are
    warned about and ignored.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: manifest must be a JSON object")
    _check_keys(raw, _MANIFEST_KEYS, f"{path}", strict)
    try:
        tiles_raw = raw["tiles"]
        name = raw.get("name", path.stem)
        labeled = bool(raw.get("labeled", False))
    except KeyError as exc:
        raise SchemaError(f"{path}: missing required key {exc}") from exc
    if not isinstance(tiles_raw, list):
        raise SchemaError(f"{path}: 'tiles' must be a list")
    tiles = []
    for i, t in enumerate(tiles_raw):
        if not isinstance(t, dict):
            raise SchemaError(f"{path}: tiles[{i}] must be an object")
        _check_keys(t, _TILE_KEYS, f"{path} tiles[{i}]", strict)
        try:
            tiles.append(
                TileMeta(
                    tile_id=str(t["tile_id"]),
                    width_px=int(t["width_px"]),
                    height_px=int(t["height_px"]),
                    ppi=float(t["ppi"]),
                    scale_denominator=float(t["scale_denominator"]),
                    lens_height_m=None if t.get("lens_height_m") is None else float(t["lens_height_m"]),
                    declared_area_m2=None
                    if t.get("declared_area_m2") is None
                    else float(t["declared_area_m2"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"{path}: tiles[{i}] malformed: {exc}") from exc
    manifest = DatasetManifest(name=name, labeled=labeled, tiles=tuple(tiles))
    manifest.validate()
    return manifest


def dataset_area(manifest: DatasetManifest, tile_ids: Optional[Iterable[str]] = None) -> float:
    """Total ground area of the manifest (or of a tile-id selection) in m2.

    An empty selection sums to 0.  Additive under any partition of the tiles.
    """
    if tile_ids is None:
        selected = manifest.tiles
    else:
        wanted = set(tile_ids)
        selected = tuple(t for t in manifest.tiles if t.tile_id in wanted)
    return float(sum(t.area_m2 for t in selected))
