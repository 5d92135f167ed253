"""bipvkit: building-integrated PV assessment from segmented satellite tiles."""

__version__ = "0.1.0"

from .dataset import BuildingCategory, DatasetManifest, TileMeta, dataset_area, load_manifest, pixel_area
from .masks import (
    ALL_BUILDINGS,
    GroundTruthMap,
    InstanceMask,
    RleMask,
    TilePrediction,
    filter_by_threshold,
    pixel_count,
    rle_decode,
    rle_encode,
    union_mask,
)
from .metrics import (
    CategoryMetrics,
    ConfusionCounts,
    PromptTemplate,
    PROMPT_TEMPLATES,
    SweepResult,
    confusion,
    evaluate_category,
    iou,
    pixel_accuracy,
    render_prompt,
    threshold_sweep,
)
from .areas import CategoryAreas, aggregate_areas, category_area, others_area
from .bipv import (
    BipvFactors,
    BipvType,
    InstallPlan,
    PanelSpec,
    aapv,
    build_install_plan,
    capacity,
    default_factors,
    panel_count,
)
from .solar import (
    Orientation,
    SurfaceConfig,
    WeatherRecord,
    WeatherSeries,
    YieldResult,
    annual_yield,
    cell_temperature,
    dc_power,
    load_weather,
    poa_irradiance,
    solar_position,
)
from .econ import CostModel, GenerationSeries, LcoeParams, annual_cost, cer, generation_series, lcoe
from .report import AssessmentReport, build_report, emit, self_sufficiency
