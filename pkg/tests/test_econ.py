import pytest
from hypothesis import given
from hypothesis import strategies as st

from bipvkit.econ import (
    CostModel,
    GenerationSeries,
    LcoeParams,
    annual_cost,
    cer,
    generation_series,
    lcoe,
)
from bipvkit.errors import InvalidParameterError, UndefinedLcoeError, ValidationError


def test_annual_cost_first_year_includes_startup():
    cm = CostModel(c_start=3.0, c_om=0.05, c_rent=0.1)
    assert annual_cost(cm, 1) == pytest.approx(3.15)


def test_annual_cost_later_years():
    cm = CostModel(c_start=3.0, c_om=0.05, c_rent=0.1)
    assert annual_cost(cm, 5) == pytest.approx(0.15)


def test_annual_cost_zero_model():
    cm = CostModel(0.0, 0.0, 0.0)
    assert all(annual_cost(cm, t) == 0.0 for t in range(1, 26))


def test_annual_cost_rejects_year_zero():
    with pytest.raises(InvalidParameterError):
        annual_cost(CostModel(1, 0, 0), 0)


def test_generation_series_no_degradation():
    s = generation_series(1000.0, 0.0, 5)
    assert s.e_t == (1000.0,) * 5


def test_generation_series_geometric_decay():
    s = generation_series(1000.0, 0.005, 3)
    assert s.e_t[1] == pytest.approx(995.0)
    assert s.e_t[2] == pytest.approx(990.025)


def test_generation_series_single_year():
    assert generation_series(10.0, 0.01, 1).n == 1


def test_lcoe_undiscounted_degenerate():
    cm = CostModel(c_start=1.0, c_om=1.0, c_rent=0.0)  # year1: 2, later: 1
    series = GenerationSeries((3.0, 3.0))
    params = LcoeParams(discount_rate=0.0, horizon_years=2)
    assert lcoe(cm, 1.0, series, params) == pytest.approx(0.5)


def test_lcoe_r0_equals_total_cost_over_total_energy():
    cm = CostModel(c_start=2.5, c_om=0.04, c_rent=0.01)
    series = generation_series(800.0, 0.005, 25)
    params = LcoeParams(discount_rate=0.0, horizon_years=25)
    capacity_w = 469.45
    total_cost = sum(annual_cost(cm, t) for t in range(1, 26)) * capacity_w
    total_energy = sum(series.e_t)
    assert lcoe(cm, capacity_w, series, params) == pytest.approx(
        total_cost / total_energy, rel=1e-12
    )


def test_lcoe_annuity_case():
    # c_start = 1 CNY/W, constant 1 kWh/yr, r = 5%, 25 years
    cm = CostModel(c_start=1.0, c_om=0.0, c_rent=0.0)
    series = GenerationSeries((1.0,) * 25)
    params = LcoeParams(discount_rate=0.05, horizon_years=25)
    annuity = sum(1.05 ** -t for t in range(1, 26))
    assert annuity == pytest.approx(14.09394, abs=1e-5)
    expected = (1.0 / 1.05) / annuity
    got = lcoe(cm, 1.0, series, params)
    assert got == pytest.approx(expected, rel=1e-12)
    assert got == pytest.approx(0.067574, abs=1e-6)


def test_lcoe_homogeneous_in_capacity():
    cm = CostModel(c_start=2.0, c_om=0.05, c_rent=0.02)
    params = LcoeParams()
    base = generation_series(700.0, 0.005, 25)
    doubled = GenerationSeries(tuple(2 * e for e in base.e_t))
    assert lcoe(cm, 100.0, base, params) == pytest.approx(
        lcoe(cm, 200.0, doubled, params), rel=1e-12
    )


@given(
    bump=st.floats(min_value=0.001, max_value=2.0),
    which=st.sampled_from(["c_start", "c_om", "c_rent"]),
)
def test_lcoe_monotone_in_costs(bump, which):
    params = LcoeParams()
    series = generation_series(500.0, 0.005, 25)
    base = CostModel(c_start=2.0, c_om=0.05, c_rent=0.02)
    bumped = CostModel(
        c_start=base.c_start + (bump if which == "c_start" else 0),
        c_om=base.c_om + (bump if which == "c_om" else 0),
        c_rent=base.c_rent + (bump if which == "c_rent" else 0),
    )
    assert lcoe(bumped, 100.0, series, params) > lcoe(base, 100.0, series, params)


def test_lcoe_monotone_decreasing_in_energy():
    params = LcoeParams()
    cm = CostModel(2.0, 0.05, 0.02)
    low = generation_series(500.0, 0.005, 25)
    high = generation_series(600.0, 0.005, 25)
    assert lcoe(cm, 100.0, high, params) < lcoe(cm, 100.0, low, params)


def test_lcoe_zero_energy_undefined():
    with pytest.raises(UndefinedLcoeError):
        lcoe(CostModel(1, 0, 0), 1.0, GenerationSeries((0.0,) * 25), LcoeParams())


def test_lcoe_requires_series_covering_horizon():
    with pytest.raises(ValidationError, match="horizon"):
        lcoe(CostModel(1, 0, 0), 1.0, GenerationSeries((1.0,) * 10), LcoeParams())


def test_cer_city_scale_cell():
    # 18.18 TWh at the default grid factor
    kg = cer(18.18e9)
    assert kg == pytest.approx(1.2431484e10)
    assert kg / 1000 / 1e7 == pytest.approx(1.2431, abs=5e-4)  # 1.2431e7 t


def test_cer_units():
    assert cer(0.0) == 0.0
    assert cer(1.0) == pytest.approx(0.6838)


def test_cer_linear():
    assert cer(3.0) + cer(4.5) == pytest.approx(cer(7.5))


def test_cer_rejects_bad_inputs():
    with pytest.raises(InvalidParameterError):
        cer(-1.0)
    with pytest.raises(InvalidParameterError):
        cer(1.0, ef=0.0)
