"""
Recognition stage chain
binarized -> cropped -> canonical -> thinned -> pruned, then feature extraction,
fanned out over a thread pool for whole datasets
"""
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from dataset.loader import LabeledSample
from features.extractor import FeatureConfig, FeatureVector, extract_features
from imaging.raster import BinaryRaster, crop_to_content, scale_to_canonical
from imaging.thinning import prune, thin
from pipeline import config

ProgressFn = Callable[[int], None]


class StageImages(BaseModel):
    model_config = ConfigDict(frozen=True)

    binarized: BinaryRaster
    cropped: BinaryRaster
    canonical: BinaryRaster
    thinned: BinaryRaster
    pruned: BinaryRaster


class PreparedGlyph(BaseModel):
    """The two rasters feature extraction reads"""
    model_config = ConfigDict(frozen=True)

    canonical: BinaryRaster
    skeleton: BinaryRaster


def run_stages(raster: BinaryRaster) -> StageImages:
    cropped = crop_to_content(raster)
    canonical = scale_to_canonical(cropped)
    thinned = thin(canonical)
    return StageImages(
        binarized=raster,
        cropped=cropped,
        canonical=canonical,
        thinned=thinned,
        pruned=prune(thinned),
    )


def prepare(raster: BinaryRaster) -> PreparedGlyph:
    stages = run_stages(raster)
    return PreparedGlyph(canonical=stages.canonical, skeleton=stages.pruned)


def featurize(raster: BinaryRaster, feature_config: FeatureConfig) -> FeatureVector:
    glyph = prepare(raster)
    return extract_features(glyph.skeleton, glyph.canonical, feature_config)


def _fan_out(fn, items: Sequence, workers: int, progress: Optional[ProgressFn]) -> List:
    """Apply fn to every item on a thread pool; results come back in input order"""
    results = [None] * len(items)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        futures = {executor.submit(fn, item): i for i, item in enumerate(items)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
            if progress is not None:
                progress(1)
    return results


def prepare_samples(
    samples: Sequence[LabeledSample],
    workers: int = config.MAX_WORKERS,
    progress: Optional[ProgressFn] = None,
) -> List[PreparedGlyph]:
    return _fan_out(lambda s: prepare(s.image), samples, workers, progress)


def features_from_prepared(
    glyphs: Sequence[PreparedGlyph],
    feature_config: FeatureConfig,
    workers: int = config.MAX_WORKERS,
    progress: Optional[ProgressFn] = None,
) -> np.ndarray:
    vectors = _fan_out(
        lambda g: extract_features(g.skeleton, g.canonical, feature_config).as_array(),
        glyphs,
        workers,
        progress,
    )
    return np.vstack(vectors) if vectors else np.empty((0, feature_config.vector_length))


def featurize_samples(
    samples: Sequence[LabeledSample],
    feature_config: FeatureConfig,
    workers: int = config.MAX_WORKERS,
    progress: Optional[ProgressFn] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Feature matrix (N, n*n+7) and label vector, both in sample order"""
    vectors = _fan_out(
        lambda s: featurize(s.image, feature_config).as_array(),
        samples,
        workers,
        progress,
    )
    labels = np.array([s.label for s in samples], dtype=int)
    matrix = np.vstack(vectors) if vectors else np.empty((0, feature_config.vector_length))
    return matrix, labels
