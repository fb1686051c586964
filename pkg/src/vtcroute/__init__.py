"""Label-free text-vs-visual routing and foveation planning for visual text compression."""

from .calibrate import run_calibration
from .cost import PRESETS, CostParams, route, transport_cost
from .features import FeatureVector, TaskSpec, extract_features
from .foveate import FovConfig, patch_cost_map, select_regions
from .render import RenderConfig, build_alignment, layout_document

__all__ = [
    "PRESETS",
    "CostParams",
    "FeatureVector",
    "FovConfig",
    "RenderConfig",
    "TaskSpec",
    "build_alignment",
    "extract_features",
    "layout_document",
    "patch_cost_map",
    "route",
    "run_calibration",
    "select_regions",
    "transport_cost",
]
