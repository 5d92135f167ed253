#!/usr/bin/env python3
"""Recompute the Zibo city-scale tables from the bundled reference areas.

Takes the published per-category rooftop areas, applies the default
conversion factors and panel spec, simulates the bundled sample weather,
and prints panel counts, annual energy, LCOE, and carbon reduction for all
18 (category, BIPV type) configurations.  A desk-scale rerun of the whole
assessment chain on real city numbers.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from bipvkit.areas import CategoryAreas
from bipvkit.bipv import PanelSpec, all_cells, build_install_plan, default_factors
from bipvkit.config import default_costs
from bipvkit.econ import DEFAULT_EMISSION_FACTOR, LcoeParams
from bipvkit.reference import (
    ZIBO_CONSUMPTION_TWH,
    ZIBO_LATITUDE_DEG,
    ZIBO_LONGITUDE_DEG,
    ZIBO_PANEL_COUNTS,
    ZIBO_ROOFTOP_AREA_M2,
)
from bipvkit.report import build_report
from bipvkit.solar import annual_yield, default_surface_configs, load_weather

WEATHER = Path(__file__).resolve().parents[1] / "data" / "weather" / "sample_2022.csv"


def main() -> None:
    areas = CategoryAreas(
        area_m2=dict(ZIBO_ROOFTOP_AREA_M2),
        all_buildings_m2=sum(ZIBO_ROOFTOP_AREA_M2.values()),
    )
    panel = PanelSpec()
    plan = build_install_plan(areas, default_factors(), panel)

    print(f"{'category':18s} {'bipv':8s} {'panels':>14s} {'published':>14s}")
    for cell in all_cells():
        cat, b = cell
        print(
            f"{cat.key:18s} {b.value:8s} {plan.cells[cell].panel_count:>14,} "
            f"{ZIBO_PANEL_COUNTS[cell]:>14,}"
        )

    series = load_weather(WEATHER)
    configs = default_surface_configs(ZIBO_LATITUDE_DEG)
    yields = {}
    for cell in all_cells():
        res = annual_yield(series, configs[cell], panel, ZIBO_LATITUDE_DEG, ZIBO_LONGITUDE_DEG)
        yields[(cell[0], cell[1], 2022)] = res.kwh_per_panel_yr

    report = build_report(
        areas=areas,
        install=plan,
        yields_kwh_per_panel=yields,
        costs=default_costs(),
        params=LcoeParams(),
        emission_factor=DEFAULT_EMISSION_FACTOR,
        consumption_kwh={2022: ZIBO_CONSUMPTION_TWH[2022] * 1e9},
    )

    print(f"\n{'category':18s} {'bipv':8s} {'TWh/yr':>8s} {'LCOE':>8s} {'CER 1e7 t':>10s}")
    for cat, b in all_cells():
        twh = report.energy_kwh[(cat, b, 2022)] / 1e9
        lcoe_v = report.lcoe_cny_per_kwh[(cat, b)]
        cer_t = report.cer_kg[(cat, b, 2022)] / 1000 / 1e7
        lcoe_s = f"{lcoe_v:.3f}" if lcoe_v is not None else "--"
        print(f"{cat.key:18s} {b.value:8s} {twh:>8.2f} {lcoe_s:>8s} {cer_t:>10.4f}")

    total_twh = report.generation_kwh(2022) / 1e9
    print(f"\ntotal generation: {total_twh:.2f} TWh")
    print(f"consumption 2022: {ZIBO_CONSUMPTION_TWH[2022]:.2f} TWh")
    print(f"self-sufficiency: {report.self_sufficiency[2022]:.3f}")
    print(f"total carbon reduction: {report.total_cer_kg / 1000 / 1e7:.4f} x 1e7 t")


if __name__ == "__main__":
    main()
