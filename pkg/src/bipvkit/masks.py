"""Run-length-encoded instance masks and ground-truth label maps.

The interchange encoding is row-major RLE over the flattened pixel grid:
alternating run lengths starting with background, so ``runs[0]`` may be 0
when the first pixel is foreground and every later run must be positive.
This keeps masks bit-exact, dependency-free, and cheap to union and count.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .dataset import BuildingCategory
from .errors import (
    CorruptMaskError,
    InvalidParameterError,
    SchemaError,
    ValidationError,
)

log = logging.getLogger(__name__)

# Sentinel category for the whole-roof ("building" prompt) instance stream.
ALL_BUILDINGS = "all"

Category = Union[BuildingCategory, str]

GT_CODES = tuple(range(7))  # 0 background, 1..6 building categories


@dataclass(frozen=True)
class RleMask:
    width_px: int
    height_px: int
    runs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "runs", tuple(int(r) for r in self.runs))

    @property
    def total_px(self) -> int:
        return self.width_px * self.height_px

    def validate(self) -> None:
        if self.width_px < 1 or self.height_px < 1:
            raise CorruptMaskError(f"mask dimensions must be >= 1, got {self.width_px}x{self.height_px}")
        if not self.runs:
            raise CorruptMaskError("mask has no runs")
        if any(r < 0 for r in self.runs):
            raise CorruptMaskError("negative run length")
        if any(r == 0 for r in self.runs[1:]):
            raise CorruptMaskError("zero-length run after the leading background run")
        if sum(self.runs) != self.total_px:
            raise CorruptMaskError(
                f"run sum {sum(self.runs)} != {self.width_px}x{self.height_px} = {self.total_px}"
            )


def empty_mask(width_px: int, height_px: int) -> RleMask:
    return RleMask(width_px, height_px, (width_px * height_px,))


def rle_encode(bitmap: np.ndarray) -> RleMask:
    """Encode a row-major boolean grid; exact inverse of :func:`rle_decode`."""
    grid = np.asarray(bitmap, dtype=bool)
    if grid.ndim != 2 or grid.size == 0:
        raise InvalidParameterError("bitmap must be a non-empty 2-D grid")
    flat = grid.ravel()
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    runs = np.diff(bounds)
    if flat[0]:
        runs = np.concatenate(([0], runs))
    h, w = grid.shape
    return RleMask(width_px=w, height_px=h, runs=tuple(int(r) for r in runs))


def rle_decode(mask: RleMask) -> np.ndarray:
    """Decode to a row-major boolean grid of shape (height_px, width_px)."""
    mask.validate()
    runs = np.asarray(mask.runs, dtype=np.int64)
    values = np.zeros(len(runs), dtype=bool)
    values[1::2] = True
    flat = np.repeat(values, runs)
    return flat.reshape(mask.height_px, mask.width_px)


def pixel_count(mask: RleMask) -> int:
    """Number of foreground pixels: the sum of odd-indexed runs."""
    return int(sum(mask.runs[1::2]))


def _require_same_dims(masks: Sequence[RleMask]) -> tuple[int, int]:
    w, h = masks[0].width_px, masks[0].height_px
    for i, m in enumerate(masks):
        if (m.width_px, m.height_px) != (w, h):
            raise ValidationError(
                f"mask {i} is {m.width_px}x{m.height_px}, expected {w}x{h}"
            )
    return w, h


def union_mask(masks: Sequence[RleMask]) -> RleMask:
    """Set-union of the foregrounds. Idempotent and commutative."""
    if not masks:
        raise InvalidParameterError("union of zero masks is undefined")
    w, h = _require_same_dims(masks)
    acc = np.zeros((h, w), dtype=bool)
    for m in masks:
        acc |= rle_decode(m)
    return rle_encode(acc)


def intersect_mask(a: RleMask, b: RleMask) -> RleMask:
    """Set-intersection of two mask foregrounds."""
    _require_same_dims([a, b])
    return rle_encode(rle_decode(a) & rle_decode(b))


@dataclass(frozen=True)
class InstanceMask:
    """One scored instance emitted by the segmenter for one prompt stream."""

    category: Category
    score: float
    mask: RleMask
    prompt_id: Optional[str] = None

    def validate(self) -> None:
        if isinstance(self.category, str) and self.category != ALL_BUILDINGS:
            raise ValidationError(f"instance category must be 1..6 or {ALL_BUILDINGS!r}, got {self.category!r}")
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError(f"instance score {self.score} outside [0, 1]")
        self.mask.validate()


@dataclass(frozen=True)
class TilePrediction:
    tile_id: str
    instances: tuple[InstanceMask, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))

    def validate(self, width_px: Optional[int] = None, height_px: Optional[int] = None) -> None:
        for inst in self.instances:
            inst.validate()
        dims = {(i.mask.width_px, i.mask.height_px) for i in self.instances}
        if width_px is not None and height_px is not None:
            dims.add((width_px, height_px))
        if len(dims) > 1:
            raise ValidationError(f"tile {self.tile_id}: instance masks disagree on dimensions {sorted(dims)}")

    def for_category(self, category: Category, prompt_id: Optional[str] = None) -> tuple[InstanceMask, ...]:
        return tuple(
            i
            for i in self.instances
            if i.category == category and (prompt_id is None or i.prompt_id == prompt_id)
        )


def filter_by_threshold(pred: TilePrediction, box_threshold: float) -> TilePrediction:
    """Keep instances with score >= box_threshold, preserving order."""
    if not 0.0 <= box_threshold <= 1.0:
        raise InvalidParameterError(f"box_threshold {box_threshold} outside [0, 1]")
    kept = tuple(i for i in pred.instances if i.score >= box_threshold)
    return TilePrediction(tile_id=pred.tile_id, instances=kept)


@dataclass(frozen=True)
class GroundTruthMap:
    """Per-pixel labels 0..6 for one tile, stored as one RLE mask per code.

    The seven per-code masks must partition the pixel grid: disjoint and
    jointly exhaustive.
    """

    tile_id: str
    width_px: int
    height_px: int
    labels: dict[int, RleMask]

    def mask_for(self, code: int) -> RleMask:
        if code not in GT_CODES:
            raise InvalidParameterError(f"label code {code} outside 0..6")
        return self.labels.get(code, empty_mask(self.width_px, self.height_px))

    def buildings_mask(self) -> RleMask:
        """Union of all building codes 1..6 (everything that is not background)."""
        return union_mask([self.mask_for(c) for c in GT_CODES[1:]])

    def validate(self) -> None:
        occupancy = np.zeros((self.height_px, self.width_px), dtype=np.int8)
        for code, m in self.labels.items():
            if code not in GT_CODES:
                raise ValidationError(f"tile {self.tile_id}: label code {code} outside 0..6")
            if (m.width_px, m.height_px) != (self.width_px, self.height_px):
                raise ValidationError(f"tile {self.tile_id}: label {code} mask dimensions mismatch")
            occupancy += rle_decode(m)
        if occupancy.max() > 1:
            raise ValidationError(f"tile {self.tile_id}: label masks overlap")
        if occupancy.min() < 1:
            raise ValidationError(f"tile {self.tile_id}: label masks do not cover every pixel")

    @classmethod
    def from_labels(cls, tile_id: str, label_grid: np.ndarray) -> "GroundTruthMap":
        grid = np.asarray(label_grid)
        if grid.ndim != 2 or grid.size == 0:
            raise InvalidParameterError("label grid must be a non-empty 2-D array")
        h, w = grid.shape
        masks = {int(code): rle_encode(grid == code) for code in np.unique(grid)}
        gt = cls(tile_id=tile_id, width_px=w, height_px=h, labels=masks)
        gt.validate()
        return gt

    def to_labels(self) -> np.ndarray:
        grid = np.zeros((self.height_px, self.width_px), dtype=np.int8)
        for code, m in self.labels.items():
            grid[rle_decode(m)] = code
        return grid


# ---------------------------------------------------------------------------
# Interchange files

_RLE_KEYS = {"width_px", "height_px", "runs"}
_INSTANCE_KEYS = {"category", "score", "prompt_id", "rle"}
_PREDICTION_KEYS = {"tile_id", "instances"}
_GT_KEYS = {"tile_id", "labels"}


def _check_keys(obj: dict, allowed: set[str], where: str, strict: bool) -> None:
    unknown = set(obj) - allowed
    if not unknown:
        return
    msg = f"unknown keys {sorted(unknown)} in {where}"
    if strict:
        raise SchemaError(msg)
    log.warning("%s (ignored)", msg)


def _rle_from_json(obj: dict, where: str, strict: bool) -> RleMask:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: rle must be an object")
    _check_keys(obj, _RLE_KEYS, where, strict)
    try:
        mask = RleMask(int(obj["width_px"]), int(obj["height_px"]), tuple(obj["runs"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: malformed rle: {exc}") from exc
    try:
        mask.validate()
    except CorruptMaskError as exc:
        raise CorruptMaskError(f"{where}: {exc}") from exc
    return mask


def _rle_to_json(mask: RleMask) -> dict:
    return {"width_px": mask.width_px, "height_px": mask.height_px, "runs": list(mask.runs)}


def _category_from_json(value, where: str) -> Category:
    if value == ALL_BUILDINGS:
        return ALL_BUILDINGS
    try:
        return BuildingCategory(int(value))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: category must be 1..6 or {ALL_BUILDINGS!r}, got {value!r}") from exc


def load_prediction(path: str | Path, strict: bool = False) -> TilePrediction:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: prediction must be a JSON object")
    _check_keys(raw, _PREDICTION_KEYS, str(path), strict)
    if "tile_id" not in raw or "instances" not in raw:
        raise SchemaError(f"{path}: prediction requires tile_id and instances")
    instances = []
    for i, inst in enumerate(raw["instances"]):
        where = f"{path} instances[{i}]"
        if not isinstance(inst, dict):
            raise SchemaError(f"{where}: must be an object")
        _check_keys(inst, _INSTANCE_KEYS, where, strict)
        try:
            score = float(inst["score"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"{where}: malformed score: {exc}") from exc
        instances.append(
            InstanceMask(
                category=_category_from_json(inst.get("category"), where),
                score=score,
                mask=_rle_from_json(inst.get("rle"), where, strict),
                prompt_id=None if inst.get("prompt_id") is None else str(inst["prompt_id"]),
            )
        )
    pred = TilePrediction(tile_id=str(raw["tile_id"]), instances=tuple(instances))
    pred.validate()
    return pred


def save_prediction(pred: TilePrediction, path: str | Path) -> None:
    payload = {
        "tile_id": pred.tile_id,
        "instances": [
            {
                "category": int(i.category) if isinstance(i.category, BuildingCategory) else i.category,
                "score": i.score,
                **({"prompt_id": i.prompt_id} if i.prompt_id is not None else {}),
                "rle": _rle_to_json(i.mask),
            }
            for i in pred.instances
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def load_ground_truth(path: str | Path, strict: bool = False) -> GroundTruthMap:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: ground truth must be a JSON object")
    _check_keys(raw, _GT_KEYS, str(path), strict)
    if "tile_id" not in raw or "labels" not in raw or not isinstance(raw["labels"], dict):
        raise SchemaError(f"{path}: ground truth requires tile_id and a labels object")
    labels: dict[int, RleMask] = {}
    dims: Optional[tuple[int, int]] = None
    for code_str, rle_obj in raw["labels"].items():
        try:
            code = int(code_str)
        except ValueError as exc:
            raise SchemaError(f"{path}: label code {code_str!r} is not an integer") from exc
        if code not in GT_CODES:
            raise SchemaError(f"{path}: label code {code} outside 0..6")
        mask = _rle_from_json(rle_obj, f"{path} labels[{code}]", strict)
        labels[code] = mask
        dims = dims or (mask.width_px, mask.height_px)
    if dims is None:
        raise SchemaError(f"{path}: labels object is empty")
    gt = GroundTruthMap(tile_id=str(raw["tile_id"]), width_px=dims[0], height_px=dims[1], labels=labels)
    gt.validate()
    return gt


def save_ground_truth(gt: GroundTruthMap, path: str | Path) -> None:
    payload = {
        "tile_id": gt.tile_id,
        "labels": {str(code): _rle_to_json(mask) for code, mask in sorted(gt.labels.items())},
    }
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def load_predictions_dir(directory: str | Path, strict: bool = False) -> dict[str, TilePrediction]:
    """Load every ``*.json`` prediction in a directory, keyed by tile_id."""
    directory = Path(directory)
    preds: dict[str, TilePrediction] = {}
    for p in sorted(directory.glob("*.json")):
        pred = load_prediction(p, strict=strict)
        if pred.tile_id in preds:
            raise SchemaError(f"{p}: duplicate prediction for tile {pred.tile_id!r}")
        preds[pred.tile_id] = pred
    return preds


def load_ground_truth_dir(directory: str | Path, strict: bool = False) -> dict[str, GroundTruthMap]:
    directory = Path(directory)
    truths: dict[str, GroundTruthMap] = {}
    for p in sorted(directory.glob("*.json")):
        gt = load_ground_truth(p, strict=strict)
        if gt.tile_id in truths:
            raise SchemaError(f"{p}: duplicate ground truth for tile {gt.tile_id!r}")
        truths[gt.tile_id] = gt
    return truths
