"""Segmentation evaluation: confusion counts, PA/IoU, prompts, grid search.

Metrics are micro-aggregated: confusion counts are summed across all tiles
of the labeled subset and the ratios taken once, which is the only
aggregation invariant to how the imagery was tiled.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .dataset import BuildingCategory
from .errors import (
    InvalidParameterError,
    MissingInputError,
    UndefinedMetricError,
    ValidationError,
)
from .masks import (
    ALL_BUILDINGS,
    Category,
    GroundTruthMap,
    RleMask,
    TilePrediction,
    empty_mask,
    filter_by_threshold,
    pixel_count,
    rle_decode,
    union_mask,
)

log = logging.getLogger(__name__)

PLACEHOLDER = "[building class]"

OBJECTIVES = ("pa", "iou")

# Default grid for box-threshold tuning; brackets the useful range around
# the typical optimum near 0.25.
DEFAULT_THRESHOLD_GRID = tuple(round(0.05 * k, 2) for k in range(1, 13))


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            tn=self.tn + other.tn,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
        )


def confusion(pred: RleMask, truth: RleMask) -> ConfusionCounts:
    """Pixel-level confusion counts between a predicted and a truth mask."""
    if (pred.width_px, pred.height_px) != (truth.width_px, truth.height_px):
        raise ValidationError(
            f"prediction is {pred.width_px}x{pred.height_px}, "
            f"truth is {truth.width_px}x{truth.height_px}"
        )
    p = rle_decode(pred)
    t = rle_decode(truth)
    tp = int((p & t).sum())
    fp = pixel_count(pred) - tp
    fn = pixel_count(truth) - tp
    tn = pred.total_px - tp - fp - fn
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def pixel_accuracy(c: ConfusionCounts) -> float:
    """Share of pixels classified correctly: (tp + tn) / total."""
    if c.total <= 0:
        raise UndefinedMetricError("pixel accuracy undefined on zero evaluated pixels")
    return (c.tp + c.tn) / c.total


def iou(c: ConfusionCounts) -> float:
    """Intersection over union: tp / (tp + fp + fn).

    When prediction and truth are both empty the union is empty; by
    convention that counts as a perfect 1.0 (see ``is_empty_class``).
    """
    denom = c.tp + c.fp + c.fn
    if denom == 0:
        return 1.0
    return c.tp / denom


def is_empty_class(c: ConfusionCounts) -> bool:
    """True when both prediction and truth are empty (union is empty)."""
    return c.tp + c.fp + c.fn == 0


@dataclass(frozen=True)
class CategoryMetrics:
    category: Category
    pa: float
    iou: float
    counts: ConfusionCounts
    empty_class: bool = False

    @classmethod
    def from_counts(cls, category: Category, counts: ConfusionCounts) -> "CategoryMetrics":
        return cls(
            category=category,
            pa=pixel_accuracy(counts),
            iou=iou(counts),
            counts=counts,
            empty_class=is_empty_class(counts),
        )


def _truth_mask(gt: GroundTruthMap, category: Category) -> RleMask:
    if category == ALL_BUILDINGS:
        return gt.buildings_mask()
    return gt.mask_for(int(category))


def _predicted_mask(
    pred: TilePrediction,
    category: Category,
    box_threshold: float,
    prompt_id: Optional[str],
    width_px: int,
    height_px: int,
) -> RleMask:
    kept = filter_by_threshold(pred, box_threshold).for_category(category, prompt_id=prompt_id)
    if not kept:
        return empty_mask(width_px, height_px)
    return union_mask([i.mask for i in kept])


def evaluate_category(
    preds: Mapping[str, TilePrediction],
    truths: Mapping[str, GroundTruthMap],
    category: Category,
    box_threshold: float,
    prompt_id: Optional[str] = None,
    jobs: int = 1,
) -> CategoryMetrics:
    """Micro-aggregated PA/IoU for one category over the labeled tiles.

    Overlapping instances of the category are unioned before counting, so a
    pixel covered twice counts once.  ``prompt_id`` restricts the evaluation
    to instances from a single prompt stream.
    """
    missing = [tid for tid in preds if tid not in truths]
    if missing:
        raise MissingInputError(f"no ground truth for tile {missing[0]!r}")

    def one_tile(tile_id: str) -> ConfusionCounts:
        gt = truths[tile_id]
        truth = _truth_mask(gt, category)
        predicted = _predicted_mask(
            preds[tile_id], category, box_threshold, prompt_id, gt.width_px, gt.height_px
        )
        return confusion(predicted, truth)

    tile_ids = sorted(preds)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(one_tile, tile_ids))
    else:
        parts = [one_tile(tid) for tid in tile_ids]
    total = ConfusionCounts()
    for part in parts:
        total = total + part
    return CategoryMetrics.from_counts(category, total)


@dataclass(frozen=True)
class SweepResult:
    category: Category
    objective: str
    grid: tuple[tuple[float, CategoryMetrics], ...]
    best_threshold: float

    @property
    def best_metrics(self) -> CategoryMetrics:
        for thr, m in self.grid:
            if thr == self.best_threshold:
                return m
        raise ValidationError("best_threshold not on grid")


def _objective_value(m: CategoryMetrics, objective: str) -> float:
    return m.pa if objective == "pa" else m.iou


def threshold_sweep(
    preds: Mapping[str, TilePrediction],
    truths: Mapping[str, GroundTruthMap],
    category: Category,
    grid: Sequence[float],
    objective: str = "pa",
    prompt_id: Optional[str] = None,
    jobs: int = 1,
) -> SweepResult:
    """Evaluate every grid threshold and pick the argmax of the objective.

    Ties break toward the smallest threshold.
    """
    if objective not in OBJECTIVES:
        raise InvalidParameterError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    if not grid:
        raise InvalidParameterError("threshold grid is empty")
    for thr in grid:
        if not 0.0 <= thr <= 1.0:
            raise InvalidParameterError(f"grid threshold {thr} outside [0, 1]")
    points = []
    for thr in sorted(set(float(t) for t in grid)):
        metrics = evaluate_category(preds, truths, category, thr, prompt_id=prompt_id, jobs=jobs)
        points.append((thr, metrics))
    best_thr, best_val = points[0][0], _objective_value(points[0][1], objective)
    for thr, m in points[1:]:
        val = _objective_value(m, objective)
        if val > best_val:
            best_thr, best_val = thr, val
    return SweepResult(
        category=category,
        objective=objective,
        grid=tuple(points),
        best_threshold=best_thr,
    )


# ---------------------------------------------------------------------------
# Prompt templates

@dataclass(frozen=True)
class PromptTemplate:
    id: str
    pattern: str

    def validate(self) -> None:
        if self.pattern.count(PLACEHOLDER) != 1:
            raise ValidationError(
                f"template {self.id}: pattern must contain {PLACEHOLDER!r} exactly once"
            )


PROMPT_TEMPLATES: tuple[PromptTemplate, ...] = (
    PromptTemplate("TP1", "[building class]"),
    PromptTemplate("TP2", "[building class] from satellite"),
    PromptTemplate("TP3", "Roofs of [building class]"),
    PromptTemplate("TP4", "Roofs of [building class] from satellite"),
    PromptTemplate("TP5", "Overhead shot of the [building class]"),
    PromptTemplate("TP6", "Many [building class] from satellite"),
)


def prompt_template(template_id: str) -> PromptTemplate:
    for t in PROMPT_TEMPLATES:
        if t.id == template_id:
            return t
    raise InvalidParameterError(f"unknown prompt template {template_id!r}")


def render_prompt(template: PromptTemplate, category_name: str) -> str:
    """Substitute the building-class placeholder verbatim."""
    template.validate()
    return template.pattern.replace(PLACEHOLDER, category_name)


# ---------------------------------------------------------------------------
# Result emission

METRIC_FIELDS = ("category", "threshold", "tp", "tn", "fp", "fn", "pa", "iou")


def _category_key(category: Category) -> str:
    if category == ALL_BUILDINGS:
        return ALL_BUILDINGS
    return BuildingCategory(int(category)).key


def metrics_row(m: CategoryMetrics, threshold: float) -> dict:
    return {
        "category": _category_key(m.category),
        "threshold": threshold,
        "tp": m.counts.tp,
        "tn": m.counts.tn,
        "fp": m.counts.fp,
        "fn": m.counts.fn,
        "pa": m.pa,
        "iou": m.iou,
    }


def write_metrics_csv(rows: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRIC_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row[k]) for k in METRIC_FIELDS})


def write_metrics_json(rows: Iterable[dict], path: str | Path) -> None:
    Path(path).write_text(json.dumps(list(rows), indent=1, sort_keys=True) + "\n")


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value
