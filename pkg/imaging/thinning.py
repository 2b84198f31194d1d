"""
Skeletonization
Parallel boundary-pixel deletion until a one-pixel-wide skeleton remains,
followed by one sweep of 3x3 masks that strip redundant corner pixels
"""
from enum import Enum
from typing import Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy import ndimage

from imaging.raster import NEIGHBOR_OFFSETS, BinaryRaster, Neighborhood, neighbor_planes, neighborhood_at, shifted
from pipeline.log import get_logger

logger = get_logger("thinning")

EIGHT_CONNECTED = np.ones((3, 3), dtype=int)


def zo_count(n: Neighborhood) -> int:
    """0->1 transitions around the cyclic sequence P2,P3,...,P9,P2"""
    ring = n.ring()
    return sum(1 for a, b in zip(ring, ring[1:] + ring[:1]) if a == 0 and b == 1)


def nz_count(n: Neighborhood) -> int:
    return sum(n.ring())


def deletable(n: Neighborhood, north: Neighborhood, west: Neighborhood) -> bool:
    """
    Deletion test for the stroke pixel at the center of ``n``.

    ``north`` and ``west`` are the neighborhoods centered on the pixels in the
    P2 and P4 positions; pass Neighborhood.from_values([0] * 9) for positions
    that fall off the raster.
    """
    if n.p1 != 1:
        raise ValueError("not a stroke pixel")
    if not 2 <= nz_count(n) <= 6:
        return False
    if zo_count(n) != 1:
        return False
    if n.p2 * n.p4 * n.p8 != 0 and zo_count(north) == 1:
        return False
    if n.p2 * n.p4 * n.p6 != 0 and zo_count(west) == 1:
        return False
    return True


def deletable_at(img: BinaryRaster, row: int, col: int) -> bool:
    """deletable() with the north/west neighborhoods looked up in ``img``"""
    empty = Neighborhood.from_values([0] * 9)
    north = neighborhood_at(img, row - 1, col) if row > 0 else empty
    west = neighborhood_at(img, row, col - 1) if col > 0 else empty
    return deletable(neighborhood_at(img, row, col), north, west)


def _zo_from_planes(planes: np.ndarray) -> np.ndarray:
    ring = planes[1:]
    following = np.roll(ring, -1, axis=0)
    return ((ring == 0) & (following == 1)).sum(axis=0)


def zo_plane(pixels: np.ndarray) -> np.ndarray:
    """zo_count evaluated at every pixel (off-raster neighbors read 0)"""
    return _zo_from_planes(neighbor_planes(pixels))


def _deletion_candidates(pixels: np.ndarray) -> np.ndarray:
    planes = neighbor_planes(pixels)
    p1, p2, _, p4, _, p6, _, p8, _ = planes
    zo = _zo_from_planes(planes)
    nz = planes[1:].sum(axis=0, dtype=np.int16)
    zo_north = shifted(zo, -1, 0)
    zo_west = shifted(zo, 0, -1)

    candidates = (p1 == 1) & (nz >= 2) & (nz <= 6) & (zo == 1)
    candidates &= ((p2 & p4 & p8) == 0) | (zo_north != 1)
    candidates &= ((p2 & p4 & p6) == 0) | (zo_west != 1)
    return candidates


def _keeps_components(pixels: np.ndarray, candidates: np.ndarray) -> bool:
    """True when deleting candidates leaves every 8-component alive and in one piece"""
    before, n_before = ndimage.label(pixels, structure=EIGHT_CONNECTED)
    survivors = (pixels == 1) & ~candidates
    _, n_after = ndimage.label(survivors, structure=EIGHT_CONNECTED)
    if n_after != n_before:
        return False
    return np.unique(before[survivors]).size == n_before


def _ring_at(padded: np.ndarray, row: int, col: int) -> List[int]:
    return [int(padded[row + 1 + dr, col + 1 + dc]) for dr, dc in NEIGHBOR_OFFSETS[1:]]


def _transitions(ring: List[int]) -> int:
    return sum(1 for a, b in zip(ring, ring[1:] + ring[:1]) if a == 0 and b == 1)


def _delete_sequentially(pixels: np.ndarray, candidates: np.ndarray) -> None:
    """Delete candidates one at a time in raster order, re-testing each against the current state"""
    padded = np.pad(pixels, 1)
    for row, col in np.argwhere(candidates):
        ring = _ring_at(padded, row, col)
        p2, p4, p6, p8 = ring[0], ring[2], ring[4], ring[6]
        if not 2 <= sum(ring) <= 6 or _transitions(ring) != 1:
            continue
        if p2 * p4 * p8 and _transitions(_ring_at(padded, row - 1, col)) == 1:
            continue
        if p2 * p4 * p6 and _transitions(_ring_at(padded, row, col - 1)) == 1:
            continue
        padded[row + 1, col + 1] = 0
    pixels[:] = padded[1:-1, 1:-1]


def thin_passes(img: BinaryRaster) -> Iterator[BinaryRaster]:
    """Yield the raster after every pass that deleted at least one pixel"""
    pixels = img.pixels.copy()
    while True:
        candidates = _deletion_candidates(pixels)
        if not candidates.any():
            return
        if _keeps_components(pixels, candidates):
            pixels[candidates] = 0
        else:
            _delete_sequentially(pixels, candidates)
        yield BinaryRaster(pixels=pixels)


def thin(img: BinaryRaster) -> BinaryRaster:
    result = img
    passes = 0
    for passes, result in enumerate(thin_passes(img), start=1):
        pass
    logger.debug(f"thinning converged after {passes} passes ({img.stroke_count} -> {result.stroke_count} pixels)")
    return result


# ============ Pruning masks ============
class MaskAction(str, Enum):
    KEEP = "keep"
    REMOVE = "remove"


class PruneMask(BaseModel):
    """3x3 pattern in image orientation; None cells are wildcards"""
    model_config = ConfigDict(frozen=True)

    name: str
    cells: Tuple[Tuple[Optional[int], ...], ...]
    action: MaskAction

    @field_validator("cells")
    @classmethod
    def _check_cells(cls, cells):
        if len(cells) != 3 or any(len(row) != 3 for row in cells):
            raise ValueError("mask must be 3x3")
        if cells[1][1] != 1:
            raise ValueError("mask center must be a stroke cell")
        return cells

    @classmethod
    def parse(cls, name: str, rows: Tuple[str, str, str], action: MaskAction) -> "PruneMask":
        cells = tuple(tuple(None if ch == "-" else int(ch) for ch in row) for row in rows)
        return cls(name=name, cells=cells, action=action)

    def matches(self, n: Neighborhood) -> bool:
        grid = n.to_grid()
        return all(
            cell is None or grid[r][c] == cell
            for r, row in enumerate(self.cells)
            for c, cell in enumerate(row)
        )

    def hits(self, pixels: np.ndarray) -> np.ndarray:
        """Boolean plane of pixels whose window matches this mask"""
        hit = pixels == 1
        for r, row in enumerate(self.cells):
            for c, cell in enumerate(row):
                if cell is not None:
                    hit &= shifted(pixels, r - 1, c - 1) == cell
        return hit


# Tested in this order; the keep mask wins over every remove mask.
MASK_TABLE = (
    ("keep-plus", ("-1-", "111", "-1-"), MaskAction.KEEP),
    ("north-west-corner", ("-1-", "11-", "--0"), MaskAction.REMOVE),
    ("north-east-corner", ("-1-", "-11", "0--"), MaskAction.REMOVE),
    ("south-west-corner", ("--0", "11-", "-1-"), MaskAction.REMOVE),
    ("south-east-corner", ("0--", "-11", "-1-"), MaskAction.REMOVE),
    ("tee-up", ("-1-", "111", "-0-"), MaskAction.REMOVE),
    ("tee-down", ("-0-", "111", "-1-"), MaskAction.REMOVE),
)

PRUNE_MASKS: List[PruneMask] = [PruneMask.parse(name, rows, action) for name, rows, action in MASK_TABLE]


def mask_action(n: Neighborhood) -> Optional[MaskAction]:
    """Action of the first matching mask, or None when nothing matches"""
    if n.p1 != 1:
        return None
    for mask in PRUNE_MASKS:
        if mask.matches(n):
            return mask.action
    return None


def prune(img: BinaryRaster) -> BinaryRaster:
    pixels = img.pixels
    keep = np.zeros(pixels.shape, dtype=bool)
    remove = np.zeros(pixels.shape, dtype=bool)
    for mask in PRUNE_MASKS:
        target = keep if mask.action == MaskAction.KEEP else remove
        target |= mask.hits(pixels)
    scheduled = remove & ~keep

    # skip pixels whose north or west neighbor went earlier in this sweep
    removed = np.zeros(pixels.shape, dtype=bool)
    for row, col in np.argwhere(scheduled):
        if (row > 0 and removed[row - 1, col]) or (col > 0 and removed[row, col - 1]):
            continue
        removed[row, col] = True

    out = pixels.copy()
    out[removed] = 0
    return BinaryRaster(pixels=out)
