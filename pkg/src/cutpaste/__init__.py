"""Deterministic cut-paste synthesis of annotated instruction pages.

The pipeline: validate a corpus of annotated manual pages, cut reusable
components out of it, plan page layouts around effective areas, composite
the components back into new annotated pages, and score detector output
against any such dataset with COCO-style metrics.
"""

from ._version import __version__, generator_version
from .baselines import (
    MIN_VISIBLE_FRACTION,
    NaiveQuantities,
    instance_switch,
    naive_cut_paste,
    sample_naive_quantities,
)
from .cli import RunConfig, main, run, synthesize
from .compositor import (
    COMPONENT_ANNOTATION,
    DEFAULT_PAGE_H,
    DEFAULT_PAGE_W,
    SynthPage,
    as_annotated_page,
    paste_min,
    render,
    resample_patch,
    write_dataset,
)
from .corpus import (
    CATEGORIES,
    CATEGORY_GEOMETRY,
    COMPONENT_CATEGORIES,
    AnnotatedPage,
    ComponentBank,
    ComponentPatch,
    CorpusError,
    Instance,
    ManifestEntry,
    StatsRow,
    canonical_json,
    corpus_stats,
    extract_components,
    format_stats_table,
    load_bank,
    load_corpus,
    load_manifest,
    save_bank,
    save_corpus,
    save_manifest,
    validate_corpus,
)
from .geometry import (
    Box,
    polygon_area,
    polygon_bbox,
    polygon_is_simple,
    rasterize_box,
    rasterize_polygon,
    transform_polygon,
)
from .layout import (
    EffectiveArea,
    LayoutError,
    LayoutParams,
    LayoutPlan,
    Placement,
    area_dims,
    plan_components,
    plan_page,
    sample_effective_areas,
    validate_plan,
)
from .metrics import (
    IOU_THRESHOLDS,
    EvalReport,
    Prediction,
    PredictionError,
    evaluate,
    evaluate_bruteforce,
    format_report_table,
    iou_box,
    iou_mask,
    load_predictions,
    save_predictions,
)
from .seeds import page_stream

__all__ = [
    "__version__",
    "generator_version",
    "MIN_VISIBLE_FRACTION",
    "NaiveQuantities",
    "instance_switch",
    "naive_cut_paste",
    "sample_naive_quantities",
    "RunConfig",
    "main",
    "run",
    "synthesize",
    "COMPONENT_ANNOTATION",
    "DEFAULT_PAGE_H",
    "DEFAULT_PAGE_W",
    "SynthPage",
    "as_annotated_page",
    "paste_min",
    "render",
    "resample_patch",
    "write_dataset",
    "CATEGORIES",
    "CATEGORY_GEOMETRY",
    "COMPONENT_CATEGORIES",
    "AnnotatedPage",
    "ComponentBank",
    "ComponentPatch",
    "CorpusError",
    "Instance",
    "ManifestEntry",
    "StatsRow",
    "canonical_json",
    "corpus_stats",
    "extract_components",
    "format_stats_table",
    "load_bank",
    "load_corpus",
    "load_manifest",
    "save_bank",
    "save_corpus",
    "save_manifest",
    "validate_corpus",
    "Box",
    "polygon_area",
    "polygon_bbox",
    "polygon_is_simple",
    "rasterize_box",
    "rasterize_polygon",
    "transform_polygon",
    "EffectiveArea",
    "LayoutError",
    "LayoutParams",
    "LayoutPlan",
    "Placement",
    "area_dims",
    "plan_components",
    "plan_page",
    "sample_effective_areas",
    "validate_plan",
    "IOU_THRESHOLDS",
    "EvalReport",
    "Prediction",
    "PredictionError",
    "evaluate",
    "evaluate_bruteforce",
    "format_report_table",
    "iou_box",
    "iou_mask",
    "load_predictions",
    "save_predictions",
    "page_stream",
]
