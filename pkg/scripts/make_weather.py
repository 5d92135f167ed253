#!/usr/bin/env python3
"""Regenerate the bundled synthetic weather years under data/weather/.

The series are deterministic for a fixed numpy version; the committed files
are the reference copies used by the tests.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from bipvkit.solar import save_weather
from bipvkit.weathergen import synthetic_year


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--years", type=int, nargs="+", default=[2021, 2022])
    parser.add_argument("--latitude", type=float, default=36.8)
    parser.add_argument("--longitude", type=float, default=118.05)
    parser.add_argument("--utc-offset", type=float, default=8.0)
    parser.add_argument(
        "--out-dir", type=Path, default=Path(__file__).resolve().parents[1] / "data" / "weather"
    )
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for year in args.years:
        series = synthetic_year(year, args.latitude, args.longitude, args.utc_offset)
        path = args.out_dir / f"sample_{year}.csv"
        save_weather(series, path)
        print(f"wrote {path} ({len(series)} records)")


if __name__ == "__main__":
    main()
