"""
Synthetic glyph generator
Renders perturbed copies of the polyline prototypes in prototypes.json as a stand-in
for a handwritten corpus: per-vertex jitter, a small global rotation and a random pen width
"""
import json
import math
from functools import lru_cache
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image, ImageDraw
from pydantic import BaseModel, Field, model_validator

from dataset.loader import LabeledSample
from imaging.raster import DEFAULT_THRESHOLD, BinaryRaster, binarize
from pipeline.log import get_logger

logger = get_logger("synthetic")

PROTOTYPE_FILE = Path(__file__).parent / "prototypes.json"

CANVAS = 140
MARGIN = 15
LOOP_VERTICES = 8

MAX_JITTER = 5.0
JITTER_SCALE = 1.75
MAX_ROTATION_DEG = 5.0
ROTATION_SCALE_DEG = 2.0
THICKNESS_CHOICES = (1, 2, 3)


class StrokeSpec(BaseModel):
    """An open polyline, or a closed loop given as (cx, cy, radius)"""
    points: Optional[List[Tuple[float, float]]] = None
    loop: Optional[Tuple[float, float, float]] = None

    @model_validator(mode="after")
    def _check(self):
        if (self.points is None) == (self.loop is None):
            raise ValueError("a stroke has either points or loop")
        if self.points is not None and len(self.points) < 2:
            raise ValueError("a polyline needs at least two points")
        lo, hi = MARGIN, CANVAS - MARGIN
        if not ((self.vertices() >= lo) & (self.vertices() <= hi)).all():
            raise ValueError(f"stroke leaves the [{lo}, {hi}] drawing area")
        return self

    @property
    def closed(self) -> bool:
        return self.loop is not None

    def vertices(self) -> np.ndarray:
        """(n, 2) array of (x, y); a loop lists each vertex once"""
        if self.points is not None:
            return np.array(self.points, dtype=np.float64)
        cx, cy, r = self.loop
        angles = np.arange(LOOP_VERTICES) * (2 * math.pi / LOOP_VERTICES)
        return np.column_stack([cx + r * np.cos(angles), cy + r * np.sin(angles)])


class GlyphPrototype(BaseModel):
    name: str
    strokes: List[StrokeSpec] = Field(min_length=1)


class PrototypeSet(BaseModel):
    canvas: int = CANVAS
    classes: List[GlyphPrototype] = Field(min_length=1)


@lru_cache(maxsize=1)
def load_prototypes() -> Tuple[GlyphPrototype, ...]:
    prototypes = PrototypeSet.model_validate(json.loads(PROTOTYPE_FILE.read_text(encoding="utf-8")))
    if prototypes.canvas != CANVAS:
        raise ValueError(f"prototype canvas {prototypes.canvas} does not match {CANVAS}")
    return tuple(prototypes.classes)


def max_classes() -> int:
    return len(load_prototypes())


def synthetic_class_names(n_classes: int) -> List[str]:
    """Index-prefixed names so lexicographic order equals generator order"""
    return [f"{i:02d}_{proto.name}" for i, proto in enumerate(load_prototypes()[:n_classes])]


def perturb_strokes(strokes: Sequence[np.ndarray], rng: np.random.Generator) -> List[np.ndarray]:
    """Move every vertex by |N(0, JITTER_SCALE)| (capped at MAX_JITTER) in a uniform direction"""
    moved = []
    for verts in strokes:
        radius = np.minimum(np.abs(rng.normal(0.0, JITTER_SCALE, len(verts))), MAX_JITTER)
        angle = rng.uniform(0.0, 2 * math.pi, len(verts))
        moved.append(verts + np.column_stack([radius * np.cos(angle), radius * np.sin(angle)]))
    return moved


def rotate_strokes(strokes: Sequence[np.ndarray], degrees: float) -> List[np.ndarray]:
    theta = math.radians(degrees)
    center = CANVAS / 2.0
    rotation = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    return [(verts - center) @ rotation.T + center for verts in strokes]


def render_strokes(
    strokes: Sequence[np.ndarray],
    closed: Sequence[bool],
    thickness: int,
) -> BinaryRaster:
    canvas = Image.new("L", (CANVAS, CANVAS), 255)
    draw = ImageDraw.Draw(canvas)
    for verts, is_closed in zip(strokes, closed):
        points = [(float(x), float(y)) for x, y in np.clip(verts, 0, CANVAS - 1)]
        if is_closed:
            points.append(points[0])
        draw.line(points, fill=0, width=thickness, joint="curve" if thickness > 1 else None)
    return binarize(np.asarray(canvas), DEFAULT_THRESHOLD)


def render_sample(prototype: GlyphPrototype, rng: np.random.Generator) -> BinaryRaster:
    thickness = int(rng.choice(THICKNESS_CHOICES))
    degrees = float(np.clip(rng.normal(0.0, ROTATION_SCALE_DEG), -MAX_ROTATION_DEG, MAX_ROTATION_DEG))
    strokes = perturb_strokes([s.vertices() for s in prototype.strokes], rng)
    strokes = rotate_strokes(strokes, degrees)
    return render_strokes(strokes, [s.closed for s in prototype.strokes], thickness)


def generate_synthetic(n_classes: int, per_class: int, seed: int) -> Tuple[List[LabeledSample], List[str]]:
    """Deterministic in (n_classes, per_class, seed); sample i of class c uses its own generator"""
    available = max_classes()
    if not 1 <= n_classes <= available:
        raise ValueError(f"n_classes must be in 1..{available}, got {n_classes}")
    if per_class < 1:
        raise ValueError(f"per_class must be >= 1, got {per_class}")
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")

    names = synthetic_class_names(n_classes)
    samples = []
    for label, prototype in enumerate(load_prototypes()[:n_classes]):
        for i in range(per_class):
            rng = np.random.default_rng([seed, label, i])
            samples.append(
                LabeledSample(
                    image=render_sample(prototype, rng),
                    label=label,
                    source_id=f"synthetic/{names[label]}/{i:04d}",
                )
            )
    logger.info(f"generated {len(samples)} synthetic samples in {n_classes} classes (seed {seed})")
    return samples, names
