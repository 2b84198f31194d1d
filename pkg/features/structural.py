"""
Structural glyph features
Junction count on the skeleton, headline (shirorekha) extent and vertical spine position
on the canonical raster
"""
from enum import Enum

import numpy as np
from scipy import ndimage

from imaging.raster import BinaryRaster
from imaging.thinning import EIGHT_CONNECTED, zo_plane

SHIROREKHA_FULL = 0.80
SHIROREKHA_PARTIAL = 0.35
TOP_BAND = 0.20
SPINE_RUN = 0.60
SPINE_END_ZONE = 0.75


class ShirorekhaType(str, Enum):
    FULL = "full"
    PARTIAL = "partial"
    NONE = "none"


class SpineType(str, Enum):
    END = "end"
    MID = "mid"
    NONE = "none"


def count_intersections(img: BinaryRaster) -> int:
    """Clusters of stroke pixels with three or more 0->1 transitions around them"""
    branch = (img.pixels == 1) & (zo_plane(img.pixels) >= 3)
    _, count = ndimage.label(branch, structure=EIGHT_CONNECTED)
    return int(count)


def longest_run(line: np.ndarray) -> int:
    """Length of the longest run of ones in a 1-D 0/1 array"""
    edges = np.diff(np.concatenate(([0], line.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    if starts.size == 0:
        return 0
    stops = np.flatnonzero(edges == -1)
    return int((stops - starts).max())


def detect_shirorekha(
    img: BinaryRaster,
    full: float = SHIROREKHA_FULL,
    partial: float = SHIROREKHA_PARTIAL,
    band: float = TOP_BAND,
) -> ShirorekhaType:
    band_rows = int(round(img.height * band))
    run = max((longest_run(row) for row in img.pixels[:band_rows]), default=0)
    ratio = run / img.width
    if ratio >= full:
        return ShirorekhaType.FULL
    if ratio >= partial:
        return ShirorekhaType.PARTIAL
    return ShirorekhaType.NONE


def detect_spine(
    img: BinaryRaster,
    min_run: float = SPINE_RUN,
    end_zone: float = SPINE_END_ZONE,
) -> SpineType:
    runs = [longest_run(column) for column in img.pixels.T]
    best_col = int(np.argmax(runs))
    if runs[best_col] / img.height < min_run:
        return SpineType.NONE
    if best_col >= int(img.width * end_zone):
        return SpineType.END
    return SpineType.MID
