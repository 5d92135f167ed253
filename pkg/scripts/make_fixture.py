#!/usr/bin/env python3
"""Build the bundled two-tile demo fixture under data/fixture/.

The fixture is fully deterministic and hand-shaped: each tile carries one
rectangle of ground truth per building category, predictions include a
well-matched high-score instance per category (best prompt), a shifted
noisy instance under a weaker prompt, and a low-score spurious instance,
so the tuning sweep has a real optimum.
"""

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from bipvkit.dataset import BuildingCategory, pixel_area
from bipvkit.masks import (
    ALL_BUILDINGS,
    GroundTruthMap,
    InstanceMask,
    TilePrediction,
    rle_encode,
    save_ground_truth,
    save_prediction,
)

SIDE = 64
PPI = 196.0
SCALE = 1110.0

# Best prompt template per directly-segmented category.
BEST_TEMPLATE = {
    BuildingCategory.APARTMENT: "TP4",
    BuildingCategory.HOUSE: "TP4",
    BuildingCategory.CENTER_BUILDING: "TP4",
    BuildingCategory.FACTORY: "TP6",
    BuildingCategory.HIGH_RISE_BUILDING: "TP5",
}

# (row0, row1, col0, col1) per code for each tile.
TILE_REGIONS = {
    "t0001": {
        1: (2, 12, 2, 22),
        2: (2, 12, 30, 50),
        3: (20, 34, 4, 24),
        4: (20, 36, 32, 60),
        5: (44, 58, 6, 20),
        6: (44, 56, 30, 44),
    },
    "t0002": {
        1: (4, 16, 6, 30),
        2: (4, 14, 38, 58),
        3: (24, 40, 2, 20),
        4: (22, 38, 28, 56),
        5: (46, 60, 40, 58),
        6: (46, 58, 4, 18),
    },
}


def rect(row0, row1, col0, col1) -> np.ndarray:
    grid = np.zeros((SIDE, SIDE), dtype=bool)
    grid[row0:row1, col0:col1] = True
    return grid


def build_tile(tile_id: str) -> tuple[GroundTruthMap, TilePrediction]:
    regions = TILE_REGIONS[tile_id]
    labels = np.zeros((SIDE, SIDE), dtype=np.int8)
    for code, (r0, r1, c0, c1) in regions.items():
        labels[r0:r1, c0:c1] = code
    gt = GroundTruthMap.from_labels(tile_id, labels)

    instances = []
    for cat in BEST_TEMPLATE:
        r0, r1, c0, c1 = regions[int(cat)]
        exact = rect(r0, r1, c0, c1)
        shifted = rect(min(r0 + 2, SIDE), min(r1 + 2, SIDE), min(c0 + 2, SIDE), min(c1 + 2, SIDE))
        spurious = rect(0, 2, 54, 64)  # background strip in both tiles
        instances.append(
            InstanceMask(cat, 0.62, rle_encode(exact), prompt_id=BEST_TEMPLATE[cat])
        )
        instances.append(InstanceMask(cat, 0.18, rle_encode(shifted), prompt_id="TP1"))
        instances.append(
            InstanceMask(cat, 0.15, rle_encode(spurious), prompt_id=BEST_TEMPLATE[cat])
        )
    buildings = labels > 0
    instances.append(InstanceMask(ALL_BUILDINGS, 0.7, rle_encode(buildings), prompt_id="building"))
    instances.append(
        InstanceMask(ALL_BUILDINGS, 0.1, rle_encode(rect(62, 64, 0, 10)), prompt_id="building")
    )
    return gt, TilePrediction(tile_id=tile_id, instances=tuple(instances))


def main() -> None:
    root = Path(__file__).resolve().parents[1] / "data" / "fixture"
    (root / "predictions").mkdir(parents=True, exist_ok=True)
    (root / "truth").mkdir(parents=True, exist_ok=True)

    s = pixel_area(SCALE, PPI)
    tiles = []
    for tile_id in sorted(TILE_REGIONS):
        gt, pred = build_tile(tile_id)
        save_ground_truth(gt, root / "truth" / f"{tile_id}.json")
        save_prediction(pred, root / "predictions" / f"{tile_id}.json")
        meta = {
            "tile_id": tile_id,
            "width_px": SIDE,
            "height_px": SIDE,
            "ppi": PPI,
            "scale_denominator": SCALE,
            "lens_height_m": 500.0,
        }
        if tile_id == "t0001":
            meta["declared_area_m2"] = round(SIDE * SIDE * s, 1)
        tiles.append(meta)

    manifest = {"name": "demo-2tile", "labeled": True, "tiles": tiles}
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")

    (root / "consumption.csv").write_text("year,kwh\n2021,12000.0\n2022,13000.0\n")

    config = {
        "manifest": "manifest.json",
        "predictions_dir": "predictions",
        "ground_truth_dir": "truth",
        "weather_by_year": {
            "2021": "../weather/sample_2021.csv",
            "2022": "../weather/sample_2022.csv",
        },
        "consumption_csv": "consumption.csv",
        "output_dir": "out",
        "site": {"latitude_deg": 36.8, "longitude_deg": 118.05},
        "thresholds": {"default": 0.25},
        "objective": "pa",
    }
    (root / "config.json").write_text(json.dumps(config, indent=1, sort_keys=True) + "\n")
    print(f"fixture written to {root}")


if __name__ == "__main__":
    main()
