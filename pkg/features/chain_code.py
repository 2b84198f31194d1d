"""
Chain-code curvature
Grid segmentation of the canonical frame and per-segment accumulated direction change
measured along a deterministic walk of the skeleton
"""
from typing import Dict, List, Sequence, Tuple

from imaging.raster import CANONICAL_SIZE, BinaryRaster

SUPPORTED_GRIDS = (2, 3, 4, 5)

# Freeman code -> (row, col) step
FREEMAN_STEPS: Dict[int, Tuple[int, int]] = {
    0: (0, 1),    # E
    1: (-1, 1),   # NE
    2: (-1, 0),   # N
    3: (-1, -1),  # NW
    4: (0, -1),   # W
    5: (1, -1),   # SW
    6: (1, 0),    # S
    7: (1, 1),    # SE
}
STEP_CODES = {step: code for code, step in FREEMAN_STEPS.items()}

# clockwise from east: E, SE, S, SW, W, NW, N, NE
WALK_ORDER = (0, 7, 6, 5, 4, 3, 2, 1)

Walk = List[Tuple[int, int]]


def check_grid(n: int) -> int:
    if n not in SUPPORTED_GRIDS:
        raise ValueError("unsupported grid")
    return n


def segment_bounds(size: int, n: int) -> List[Tuple[int, int]]:
    """Half-open [start, stop) spans; cell k starts at floor(k*size/n)"""
    return [(k * size // n, (k + 1) * size // n) for k in range(n)]


def segment_grid(img: BinaryRaster, n: int) -> List[BinaryRaster]:
    """Split the canonical raster into n*n cells, row-major"""
    check_grid(n)
    if (img.height, img.width) != (CANONICAL_SIZE, CANONICAL_SIZE):
        raise ValueError(f"segment_grid expects a {CANONICAL_SIZE}x{CANONICAL_SIZE} raster, got {img.height}x{img.width}")
    spans = segment_bounds(CANONICAL_SIZE, n)
    return [
        BinaryRaster(pixels=img.pixels[r0:r1, c0:c1])
        for r0, r1 in spans
        for c0, c1 in spans
    ]


def trace_walks(seg: BinaryRaster) -> List[Walk]:
    """
    Cover every stroke pixel with greedy walks.

    A walk starts at the first unvisited stroke pixel in row-major order and
    keeps stepping to the first unvisited 8-neighbor in WALK_ORDER until it
    dead-ends. Every stroke pixel ends up in exactly one walk.
    """
    grid = seg.pixels.tolist()
    height, width = seg.height, seg.width
    visited = [[False] * width for _ in range(height)]
    walks: List[Walk] = []

    for start_row in range(height):
        for start_col in range(width):
            if not grid[start_row][start_col] or visited[start_row][start_col]:
                continue
            row, col = start_row, start_col
            visited[row][col] = True
            walk = [(row, col)]
            while True:
                for code in WALK_ORDER:
                    dr, dc = FREEMAN_STEPS[code]
                    nr, nc = row + dr, col + dc
                    if 0 <= nr < height and 0 <= nc < width and grid[nr][nc] and not visited[nr][nc]:
                        break
                else:
                    break
                row, col = nr, nc
                visited[row][col] = True
                walk.append((row, col))
            walks.append(walk)
    return walks


def chain_codes(walk: Sequence[Tuple[int, int]]) -> List[int]:
    return [STEP_CODES[(r1 - r0, c1 - c0)] for (r0, c0), (r1, c1) in zip(walk, walk[1:])]


def angular_change(codes: Sequence[int]) -> int:
    """Sum of direction changes between consecutive codes, in 45 degree units"""
    total = 0
    for prev, cur in zip(codes, codes[1:]):
        diff = abs(cur - prev)
        total += min(diff, 8 - diff)
    return total


def gc_of_segment(seg: BinaryRaster) -> int:
    return sum(angular_change(chain_codes(walk)) for walk in trace_walks(seg))
