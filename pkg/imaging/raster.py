"""
Binary raster primitives
Stroke bitmaps, fixed-threshold binarization, tight cropping, canonical scaling
and the 3x3 neighborhood layout used by thinning and feature extraction
"""
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

CANONICAL_SIZE = 140
DEFAULT_THRESHOLD = 128

# (row, col) offsets of P1..P9 relative to the center pixel.
#   P3 P2 P9
#   P4 P1 P8
#   P5 P6 P7
NEIGHBOR_OFFSETS: Tuple[Tuple[int, int], ...] = (
    (0, 0),    # P1 center
    (-1, 0),   # P2 north
    (-1, -1),  # P3 northwest
    (0, -1),   # P4 west
    (1, -1),   # P5 southwest
    (1, 0),    # P6 south
    (1, 1),    # P7 southeast
    (0, 1),    # P8 east
    (-1, 1),   # P9 northeast
)


class BinaryRaster(BaseModel):
    """Immutable row-major bitmap, 1 = stroke (dark), 0 = background"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pixels: np.ndarray

    @field_validator("pixels", mode="before")
    @classmethod
    def _check_pixels(cls, value):
        arr = np.asarray(value)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("raster must be a nonempty 2-D grid")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("raster pixels must be 0 or 1")
        arr = arr.astype(np.uint8, copy=True)
        arr.setflags(write=False)
        return arr

    @classmethod
    def blank(cls, height: int, width: int) -> "BinaryRaster":
        return cls(pixels=np.zeros((height, width), dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "BinaryRaster":
        """Build from text rows where '#' or '1' is stroke and anything else background"""
        return cls(pixels=[[1 if ch in "#1" else 0 for ch in row] for row in rows])

    def to_rows(self) -> List[str]:
        return ["".join("#" if v else "." for v in row) for row in self.pixels.tolist()]

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def stroke_count(self) -> int:
        return int(self.pixels.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryRaster):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self) -> int:
        return hash((self.pixels.shape, self.pixels.tobytes()))


class Neighborhood(BaseModel):
    """3x3 window around P1; see NEIGHBOR_OFFSETS for the compass layout"""
    model_config = ConfigDict(frozen=True)

    p1: int = Field(ge=0, le=1)
    p2: int = Field(ge=0, le=1)
    p3: int = Field(ge=0, le=1)
    p4: int = Field(ge=0, le=1)
    p5: int = Field(ge=0, le=1)
    p6: int = Field(ge=0, le=1)
    p7: int = Field(ge=0, le=1)
    p8: int = Field(ge=0, le=1)
    p9: int = Field(ge=0, le=1)

    @classmethod
    def from_values(cls, values: Sequence[int]) -> "Neighborhood":
        """Build from the nine values P1..P9 in order"""
        if len(values) != 9:
            raise ValueError("a neighborhood has exactly nine values")
        return cls(**{f"p{i}": int(v) for i, v in enumerate(values, start=1)})

    @classmethod
    def from_grid(cls, grid: Sequence[Sequence[int]]) -> "Neighborhood":
        """Build from a 3x3 grid in image orientation (row 0 is north)"""
        values = [int(grid[1 + dr][1 + dc]) for dr, dc in NEIGHBOR_OFFSETS]
        return cls.from_values(values)

    def to_grid(self) -> List[List[int]]:
        grid = [[0] * 3 for _ in range(3)]
        for value, (dr, dc) in zip(self.values(), NEIGHBOR_OFFSETS):
            grid[1 + dr][1 + dc] = value
        return grid

    def values(self) -> Tuple[int, ...]:
        return (self.p1, self.p2, self.p3, self.p4, self.p5, self.p6, self.p7, self.p8, self.p9)

    def ring(self) -> Tuple[int, ...]:
        """Neighbors in cyclic order P2..P9"""
        return self.values()[1:]


def binarize(gray, threshold: int = DEFAULT_THRESHOLD) -> BinaryRaster:
    """Stroke where intensity is strictly below threshold (dark ink on light paper)"""
    arr = np.asarray(gray)
    if arr.size == 0:
        raise ValueError("empty image")
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D grayscale image, got shape {arr.shape}")
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold {threshold} outside 0..255")
    return BinaryRaster(pixels=arr < threshold)


def crop_to_content(img: BinaryRaster) -> BinaryRaster:
    rows = np.flatnonzero(img.pixels.any(axis=1))
    if rows.size == 0:
        raise ValueError("blank image")
    cols = np.flatnonzero(img.pixels.any(axis=0))
    return BinaryRaster(pixels=img.pixels[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1])


def scale_to_canonical(img: BinaryRaster, size: int = CANONICAL_SIZE) -> BinaryRaster:
    """Nearest-neighbor resample: output (r, c) samples source (r*h//size, c*w//size)"""
    src_rows = (np.arange(size) * img.height) // size
    src_cols = (np.arange(size) * img.width) // size
    return BinaryRaster(pixels=img.pixels[np.ix_(src_rows, src_cols)])


def shifted(plane: np.ndarray, dr: int, dc: int) -> np.ndarray:
    """out[r, c] = plane[r + dr, c + dc], reading 0 off the raster"""
    height, width = plane.shape
    out = np.zeros_like(plane)
    dst_rows = slice(max(0, -dr), min(height, height - dr))
    dst_cols = slice(max(0, -dc), min(width, width - dc))
    src_rows = slice(max(0, dr), min(height, height + dr))
    src_cols = slice(max(0, dc), min(width, width + dc))
    out[dst_rows, dst_cols] = plane[src_rows, src_cols]
    return out


def neighbor_planes(pixels: np.ndarray) -> np.ndarray:
    """Stack of shape (9, H, W): plane i holds P(i+1) for every pixel"""
    return np.stack([shifted(pixels, dr, dc) for dr, dc in NEIGHBOR_OFFSETS])


def neighborhood_at(img: BinaryRaster, row: int, col: int) -> Neighborhood:
    if not (0 <= row < img.height and 0 <= col < img.width):
        raise ValueError("index out of bounds")
    values = []
    for dr, dc in NEIGHBOR_OFFSETS:
        r, c = row + dr, col + dc
        inside = 0 <= r < img.height and 0 <= c < img.width
        values.append(int(img.pixels[r, c]) if inside else 0)
    return Neighborhood.from_values(values)
