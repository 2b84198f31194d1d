"""
Feature vector assembly
Per-segment curvature, intersections and the two one-hot structural categories
"""
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from features.chain_code import SUPPORTED_GRIDS, check_grid, gc_of_segment, segment_grid
from features.structural import (
    SHIROREKHA_FULL,
    SHIROREKHA_PARTIAL,
    SPINE_END_ZONE,
    SPINE_RUN,
    TOP_BAND,
    ShirorekhaType,
    SpineType,
    count_intersections,
    detect_shirorekha,
    detect_spine,
)
from imaging.raster import BinaryRaster

SHIROREKHA_ORDER = (ShirorekhaType.FULL, ShirorekhaType.PARTIAL, ShirorekhaType.NONE)
SPINE_ORDER = (SpineType.END, SpineType.MID, SpineType.NONE)


class FeatureConfig(BaseModel):
    """Knobs of the feature stage"""
    model_config = ConfigDict(frozen=True)

    grid_n: int = Field(4, description="Segments per side of the grid")
    norm_factor: float = Field(40.0, gt=0, description="Divisor applied to each segment's gc")
    intersection_divisor: float = Field(10.0, gt=0)
    shirorekha_full: float = Field(SHIROREKHA_FULL, gt=0, le=1)
    shirorekha_partial: float = Field(SHIROREKHA_PARTIAL, gt=0, le=1)
    top_band: float = Field(TOP_BAND, gt=0, le=1)
    spine_run: float = Field(SPINE_RUN, gt=0, le=1)
    spine_end_zone: float = Field(SPINE_END_ZONE, gt=0, lt=1)

    @field_validator("grid_n")
    @classmethod
    def _check_grid(cls, value: int) -> int:
        return check_grid(value)

    @model_validator(mode="after")
    def _check_thresholds(self):
        if self.shirorekha_partial > self.shirorekha_full:
            raise ValueError("shirorekha partial threshold exceeds the full threshold")
        return self

    @property
    def vector_length(self) -> int:
        return self.grid_n ** 2 + len(SHIROREKHA_ORDER) + len(SPINE_ORDER) + 1


class FeatureVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    gc: List[float]
    intersections: float = Field(ge=0, le=1)
    shirorekha: ShirorekhaType
    spine: SpineType

    @field_validator("gc")
    @classmethod
    def _check_gc(cls, values: List[float]) -> List[float]:
        if len(values) not in {n * n for n in SUPPORTED_GRIDS}:
            raise ValueError(f"gc must hold n*n values for n in {SUPPORTED_GRIDS}, got {len(values)}")
        if any(not 0.0 <= v <= 1.0 for v in values):
            raise ValueError("gc values must lie in [0, 1]")
        return values

    def as_array(self) -> np.ndarray:
        """gc row-major, intersections, shirorekha one-hot (F,P,N), spine one-hot (E,M,N)"""
        shirorekha = [1.0 if self.shirorekha == kind else 0.0 for kind in SHIROREKHA_ORDER]
        spine = [1.0 if self.spine == kind else 0.0 for kind in SPINE_ORDER]
        return np.array(self.gc + [self.intersections] + shirorekha + spine, dtype=np.float64)

    def to_line(self) -> str:
        return ",".join(f"{v:.6f}" for v in self.as_array())


def extract_features(skeleton: BinaryRaster, canonical: BinaryRaster, config: FeatureConfig = None) -> FeatureVector:
    """
    Build the feature vector of one glyph.

    ``skeleton`` is the pruned skeleton and feeds the curvature and junction
    features; ``canonical`` is the scaled raster before thinning and feeds the
    headline and spine detectors.
    """
    config = config or FeatureConfig()
    gc = [
        min(1.0, gc_of_segment(cell) / config.norm_factor)
        for cell in segment_grid(skeleton, config.grid_n)
    ]
    intersections = min(1.0, count_intersections(skeleton) / config.intersection_divisor)
    shirorekha = detect_shirorekha(
        canonical,
        full=config.shirorekha_full,
        partial=config.shirorekha_partial,
        band=config.top_band,
    )
    spine = detect_spine(canonical, min_run=config.spine_run, end_zone=config.spine_end_zone)
    return FeatureVector(gc=gc, intersections=intersections, shirorekha=shirorekha, spine=spine)
