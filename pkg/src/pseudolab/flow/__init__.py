"""Flow maps, moving control regions and the geometric assumption checker."""

from pseudolab.flow.assumption import RegionAssumptionReport, centroid_curve, check_assumption, component_counts, phantom_survivors
from pseudolab.flow.flowmap import FlowMap, integrate_flow
from pseudolab.flow.regions import (
    BallRegion,
    BoxRegion,
    MovingRegion,
    NestedRegions,
    RegionShape,
    default_rho,
    indicator_values,
    rasterize_region,
    smooth_indicator,
    static_region,
)
from pseudolab.flow.sweep import SweepConfig
from pseudolab.flow.velocity import VelocityField, VelocitySpec

__all__ = [
    "BallRegion",
    "BoxRegion",
    "FlowMap",
    "MovingRegion",
    "NestedRegions",
    "RegionAssumptionReport",
    "RegionShape",
    "SweepConfig",
    "VelocityField",
    "VelocitySpec",
    "centroid_curve",
    "check_assumption",
    "component_counts",
    "default_rho",
    "indicator_values",
    "integrate_flow",
    "phantom_survivors",
    "rasterize_region",
    "smooth_indicator",
    "static_region",
]
