import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from features.chain_code import (
    angular_change,
    chain_codes,
    gc_of_segment,
    segment_bounds,
    segment_grid,
    trace_walks,
)
from features.extractor import FeatureConfig, FeatureVector, extract_features
from features.structural import (
    ShirorekhaType,
    SpineType,
    count_intersections,
    detect_shirorekha,
    detect_spine,
    longest_run,
)
from imaging.raster import CANONICAL_SIZE, BinaryRaster
from imaging.thinning import prune, thin
from tests.conftest import draw_polyline, raster

SIZE = CANONICAL_SIZE

# (row, col) steps clockwise from east
CLOCKWISE = [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)]


def canvas(cells):
    pixels = np.zeros((SIZE, SIZE), dtype=np.uint8)
    for r, c in cells:
        pixels[r, c] = 1
    return BinaryRaster(pixels=pixels)


def oracle_gc(seg: BinaryRaster) -> int:
    """Same walk rule, direction change measured from step angles in degrees"""
    stroke = {(int(r), int(c)) for r, c in zip(*np.nonzero(seg.pixels))}
    visited = set()
    total = 0
    for start in sorted(stroke):
        if start in visited:
            continue
        visited.add(start)
        here, previous_angle = start, None
        while True:
            step = next(
                (s for s in CLOCKWISE if (here[0] + s[0], here[1] + s[1]) in stroke - visited),
                None,
            )
            if step is None:
                break
            angle = math.degrees(math.atan2(-step[0], step[1]))
            if previous_angle is not None:
                diff = abs(angle - previous_angle) % 360
                total += round(min(diff, 360 - diff) / 45)
            previous_angle = angle
            here = (here[0] + step[0], here[1] + step[1])
            visited.add(here)
    return total


def random_polyline(rng):
    n_points = int(rng.integers(2, 7))
    return [(int(x), int(y)) for x, y in rng.integers(5, SIZE - 5, size=(n_points, 2))]


class TestSegmentGrid:
    @pytest.mark.parametrize("n,side", [(2, 70), (4, 35), (5, 28)])
    def test_equal_cells(self, n, side):
        cells = segment_grid(BinaryRaster.blank(SIZE, SIZE), n)
        assert len(cells) == n * n
        assert all((cell.height, cell.width) == (side, side) for cell in cells)

    def test_three_follows_floor_rule(self):
        assert segment_bounds(SIZE, 3) == [(0, 46), (46, 93), (93, 140)]
        cells = segment_grid(BinaryRaster.blank(SIZE, SIZE), 3)
        assert [cell.width for cell in cells[:3]] == [46, 47, 47]
        assert [cells[i].height for i in (0, 3, 6)] == [46, 47, 47]

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_cells_tile_the_image(self, n):
        rng = np.random.default_rng(n)
        img = BinaryRaster(pixels=rng.integers(0, 2, (SIZE, SIZE)))
        cells = segment_grid(img, n)
        assert sum(cell.stroke_count for cell in cells) == img.stroke_count
        rows = [np.hstack([cells[r * n + c].pixels for c in range(n)]) for r in range(n)]
        assert np.array_equal(np.vstack(rows), img.pixels)

    def test_row_major_order(self):
        img = canvas([(0, 139)])
        cells = segment_grid(img, 2)
        assert [cell.stroke_count for cell in cells] == [0, 1, 0, 0]

    @pytest.mark.parametrize("n", [1, 6, 7])
    def test_unsupported_grid(self, n):
        with pytest.raises(ValueError, match="unsupported grid"):
            segment_grid(BinaryRaster.blank(SIZE, SIZE), n)

    def test_requires_canonical_frame(self):
        with pytest.raises(ValueError):
            segment_grid(BinaryRaster.blank(70, 70), 2)


class TestGc:
    def test_empty_segment(self):
        assert gc_of_segment(BinaryRaster.blank(28, 28)) == 0

    def test_straight_horizontal(self):
        assert gc_of_segment(raster(".....", "#####", ".....")) == 0

    def test_right_angle(self):
        seg = raster(
            "###",
            "..#",
            "..#",
        )
        assert chain_codes(trace_walks(seg)[0]) == [0, 0, 6, 6]
        assert gc_of_segment(seg) == 2

    @pytest.mark.parametrize("step", CLOCKWISE)
    def test_straight_stroke_in_any_direction(self, step):
        cells = [(70 + k * step[0], 70 + k * step[1]) for k in range(8)]
        assert gc_of_segment(canvas(cells)) == 0

    def test_angular_change_wraps(self):
        assert angular_change([0, 7]) == 1
        assert angular_change([1, 5]) == 4
        assert angular_change([0, 0, 2, 2]) == 2

    def test_walks_cover_every_pixel_once(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            seg = BinaryRaster(pixels=rng.integers(0, 2, (20, 20)))
            walks = trace_walks(seg)
            visited = [p for walk in walks for p in walk]
            assert len(visited) == seg.stroke_count
            assert len(set(visited)) == len(visited)

    def test_no_change_across_walk_boundaries(self):
        # two separate horizontal strokes: the jump between them costs nothing
        seg = raster("###..", ".....", "..###")
        assert len(trace_walks(seg)) == 2
        assert gc_of_segment(seg) == 0

    def test_matches_traversal_oracle_on_polylines(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            img = draw_polyline(random_polyline(rng), size=(SIZE, SIZE))
            for cell in segment_grid(img, 4):
                assert gc_of_segment(cell) == oracle_gc(cell)


class TestIntersections:
    def test_straight_line(self):
        assert count_intersections(raster(".......", ".#####.", ".......")) == 0

    def test_plus(self, plus_sign):
        assert count_intersections(plus_sign) == 1

    def test_tee(self):
        tee = raster(
            ".......",
            ".#####.",
            "...#...",
            "...#...",
            ".......",
        )
        assert count_intersections(tee) == 1

    @pytest.mark.parametrize("rows", [
        ("#......", ".#.....", "..#....", "...####"),
        ("#.#.#", ".#.#."),
        ("####", "...#", "...#", "####"),
    ])
    def test_simple_open_curves(self, rows):
        assert count_intersections(raster(*rows)) == 0

    def test_two_separate_crossings(self):
        crosses = raster(
            "..#.....#..",
            ".###...###.",
            "..#.....#..",
        )
        assert count_intersections(crosses) == 2


class TestStructural:
    def test_longest_run(self):
        assert longest_run(np.array([0, 1, 1, 0, 1, 1, 1, 0])) == 3
        assert longest_run(np.zeros(5, dtype=np.uint8)) == 0
        assert longest_run(np.ones(4, dtype=np.uint8)) == 4

    def test_shirorekha_full(self):
        assert detect_shirorekha(canvas([(5, c) for c in range(SIZE)])) == ShirorekhaType.FULL

    def test_shirorekha_partial(self):
        assert detect_shirorekha(canvas([(10, c) for c in range(20, 90)])) == ShirorekhaType.PARTIAL

    def test_shirorekha_none_below_band(self):
        # row 28 is the first row outside the top 20%
        assert detect_shirorekha(canvas([(28, c) for c in range(SIZE)])) == ShirorekhaType.NONE
        assert detect_shirorekha(canvas([(27, c) for c in range(SIZE)])) == ShirorekhaType.FULL

    def test_shirorekha_thresholds_are_inclusive(self):
        assert detect_shirorekha(canvas([(0, c) for c in range(112)])) == ShirorekhaType.FULL
        assert detect_shirorekha(canvas([(0, c) for c in range(49)])) == ShirorekhaType.PARTIAL
        assert detect_shirorekha(canvas([(0, c) for c in range(48)])) == ShirorekhaType.NONE

    def test_spine_end(self):
        assert detect_spine(canvas([(r, 139) for r in range(SIZE)])) == SpineType.END

    def test_spine_mid(self):
        assert detect_spine(canvas([(r, 70) for r in range(SIZE)])) == SpineType.MID

    def test_spine_boundary_column(self):
        assert detect_spine(canvas([(r, 105) for r in range(SIZE)])) == SpineType.END
        assert detect_spine(canvas([(r, 104) for r in range(SIZE)])) == SpineType.MID

    def test_spine_none(self):
        assert detect_spine(canvas([(r, 120) for r in range(83)])) == SpineType.NONE
        assert detect_spine(BinaryRaster.blank(SIZE, SIZE)) == SpineType.NONE

    def test_spine_ties_go_left(self):
        cells = [(r, c) for r in range(SIZE) for c in (30, 130)]
        assert detect_spine(canvas(cells)) == SpineType.MID


class TestExtract:
    def test_blank_vector(self):
        blank = BinaryRaster.blank(SIZE, SIZE)
        vector = extract_features(blank, blank)
        assert vector.as_array().tolist() == [0.0] * 17 + [0.0, 0.0, 1.0, 0.0, 0.0, 1.0]

    def test_grid_five_length(self):
        blank = BinaryRaster.blank(SIZE, SIZE)
        vector = extract_features(blank, blank, FeatureConfig(grid_n=5))
        assert vector.as_array().shape == (32,)
        assert FeatureConfig(grid_n=5).vector_length == 32

    def test_bar_and_right_column(self):
        cells = [(5, c) for c in range(SIZE)] + [(r, 139) for r in range(SIZE)]
        glyph = canvas(cells)
        vector = extract_features(prune(thin(glyph)), glyph)
        assert vector.shirorekha == ShirorekhaType.FULL
        assert vector.spine == SpineType.END
        values = vector.as_array()
        assert values[17:20].tolist() == [1.0, 0.0, 0.0]
        assert values[20:23].tolist() == [1.0, 0.0, 0.0]

    def test_values_clamped_to_unit_interval(self):
        rng = np.random.default_rng(2)
        noisy = BinaryRaster(pixels=rng.integers(0, 2, (SIZE, SIZE)))
        values = extract_features(noisy, noisy, FeatureConfig(norm_factor=1.0)).as_array()
        assert values.min() >= 0.0 and values.max() <= 1.0
        assert values[:16].max() == 1.0

    def test_norm_factor_divides_gc(self):
        seg_cells = [(10, c) for c in range(5, 15)] + [(r, 14) for r in range(11, 20)]
        glyph = canvas(seg_cells)
        loose = extract_features(glyph, glyph, FeatureConfig(norm_factor=40.0))
        tight = extract_features(glyph, glyph, FeatureConfig(norm_factor=20.0))
        assert loose.gc[0] == pytest.approx(2 / 40)
        assert tight.gc[0] == pytest.approx(2 / 20)

    @settings(max_examples=15, deadline=None)
    @given(st.lists(st.tuples(st.integers(5, 134), st.integers(5, 134)), min_size=2, max_size=6))
    def test_deterministic_with_one_hot_triples(self, points):
        glyph = draw_polyline(points, size=(SIZE, SIZE), width=3)
        skeleton = prune(thin(glyph))
        first = extract_features(skeleton, glyph).as_array()
        second = extract_features(BinaryRaster(pixels=skeleton.pixels.copy()), glyph).as_array()
        assert first.tobytes() == second.tobytes()
        assert first[17:20].sum() == 1.0
        assert first[20:23].sum() == 1.0

    def test_to_line_order_and_format(self):
        vector = FeatureVector(
            gc=[0.5, 0.25, 0.0, 1.0],
            intersections=0.1,
            shirorekha=ShirorekhaType.PARTIAL,
            spine=SpineType.MID,
        )
        assert vector.to_line() == (
            "0.500000,0.250000,0.000000,1.000000,0.100000,"
            "0.000000,1.000000,0.000000,0.000000,1.000000,0.000000"
        )


class TestFeatureConfig:
    def test_defaults(self):
        config = FeatureConfig()
        assert (config.grid_n, config.norm_factor, config.intersection_divisor) == (4, 40.0, 10.0)
        assert config.vector_length == 23

    def test_rejects_unsupported_grid(self):
        with pytest.raises(ValidationError, match="unsupported grid"):
            FeatureConfig(grid_n=7)

    def test_rejects_inverted_shirorekha_thresholds(self):
        with pytest.raises(ValidationError):
            FeatureConfig(shirorekha_full=0.3, shirorekha_partial=0.5)

    def test_rejects_bad_gc_length(self):
        with pytest.raises(ValidationError):
            FeatureVector(gc=[0.0] * 7, intersections=0.0, shirorekha="none", spine="none")
