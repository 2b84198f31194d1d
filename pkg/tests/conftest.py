"""Shared fixtures and raster builders"""
import numpy as np
import pytest
from PIL import Image, ImageDraw

from imaging.raster import BinaryRaster


def raster(*rows: str) -> BinaryRaster:
    """'#' is stroke, '.' background"""
    return BinaryRaster.from_rows(rows)


def draw_polyline(points, size=(40, 40), width=1) -> BinaryRaster:
    """Render (x, y) points with Pillow as a stroke raster"""
    canvas = Image.new("L", size, 255)
    ImageDraw.Draw(canvas).line([tuple(p) for p in points], fill=0, width=width)
    return BinaryRaster(pixels=np.asarray(canvas) < 128)


def blob_corpus(count: int, seed: int = 0):
    """Filled rectangles, ellipses and thick polylines on small canvases"""
    rng = np.random.default_rng(seed)
    shapes = []
    for i in range(count):
        h, w = (int(v) for v in rng.integers(24, 48, size=2))
        canvas = Image.new("L", (w, h), 255)
        draw = ImageDraw.Draw(canvas)
        kind = i % 3
        if kind == 0:
            x0, y0 = (int(v) for v in rng.integers(1, 8, size=2))
            x1 = int(rng.integers(x0 + 2, w - 1))
            y1 = int(rng.integers(y0 + 2, h - 1))
            draw.rectangle([x0, y0, x1, y1], fill=0)
        elif kind == 1:
            x0, y0 = (int(v) for v in rng.integers(1, 8, size=2))
            x1 = int(rng.integers(x0 + 4, w - 1))
            y1 = int(rng.integers(y0 + 4, h - 1))
            draw.ellipse([x0, y0, x1, y1], fill=0)
        else:
            n_points = int(rng.integers(2, 6))
            points = [(int(rng.integers(2, w - 2)), int(rng.integers(2, h - 2))) for _ in range(n_points)]
            draw.line(points, fill=0, width=int(rng.integers(1, 6)), joint="curve")
        shapes.append(BinaryRaster(pixels=np.asarray(canvas) < 128))
    return shapes


@pytest.fixture
def plus_sign():
    return raster(
        ".....",
        "..#..",
        ".###.",
        "..#..",
        ".....",
    )


@pytest.fixture
def xor_data():
    features = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    targets = np.array([[0.0], [1.0], [1.0], [0.0]])
    return features, targets
