"""
Labeled image datasets on disk
One subdirectory per class, class indices in lexicographic directory order
"""
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from imaging.netpbm import read_raster, write_pbm
from imaging.raster import DEFAULT_THRESHOLD, BinaryRaster
from pipeline import config
from pipeline.log import get_logger

logger = get_logger("dataset")

IMAGE_SUFFIXES = {".pbm", ".pgm", ".pnm"}

PathLike = Union[str, Path]


class LabeledSample(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    image: BinaryRaster
    label: int = Field(ge=0)
    source_id: str


def load_dataset(
    root: PathLike,
    threshold: int = DEFAULT_THRESHOLD,
    workers: int = config.MAX_WORKERS,
) -> Tuple[List[LabeledSample], List[str]]:
    """Read every image under root; returns samples in (class, file name) order and the class names"""
    root = Path(root)
    if not root.is_dir():
        raise ValueError(f"dataset root {root} is not a directory")
    class_dirs = sorted((d for d in root.iterdir() if d.is_dir()), key=lambda d: d.name)
    if not class_dirs:
        raise ValueError("no classes found")

    jobs: List[Tuple[int, Path, str]] = []
    for label, class_dir in enumerate(class_dirs):
        files = sorted(
            (f for f in class_dir.iterdir() if f.is_file() and f.suffix.lower() in IMAGE_SUFFIXES),
            key=lambda f: f.name,
        )
        if not files:
            raise ValueError(f"class '{class_dir.name}' has no samples")
        jobs += [(label, f, f"{class_dir.name}/{f.name}") for f in files]

    images: List[BinaryRaster] = [None] * len(jobs)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        futures = {executor.submit(read_raster, path, threshold): i for i, (_, path, _) in enumerate(jobs)}
        for future in as_completed(futures):
            images[futures[future]] = future.result()

    samples = [
        LabeledSample(image=image, label=label, source_id=source_id)
        for image, (label, _, source_id) in zip(images, jobs)
    ]
    class_names = [d.name for d in class_dirs]
    logger.info(f"loaded {len(samples)} samples in {len(class_names)} classes from {root}")
    return samples, class_names


def write_dataset(samples: Sequence[LabeledSample], class_names: Sequence[str], out_dir: PathLike) -> List[Path]:
    """Lay samples out as <out>/<class>/<file>.pbm so load_dataset can read them back"""
    out_dir = Path(out_dir)
    written = []
    for sample in samples:
        class_dir = out_dir / class_names[sample.label]
        class_dir.mkdir(parents=True, exist_ok=True)
        name = Path(sample.source_id).stem
        written.append(write_pbm(sample.image, class_dir / f"{class_names[sample.label]}_{name}.pbm"))
    return written


def manifest_frame(samples: Sequence[LabeledSample], class_names: Sequence[str]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "source_id": [s.source_id for s in samples],
            "class_index": [s.label for s in samples],
            "class_name": [class_names[s.label] for s in samples],
        }
    )


def export_manifest(samples: Sequence[LabeledSample], class_names: Sequence[str], path: PathLike) -> Path:
    path = Path(path)
    manifest_frame(samples, class_names).to_csv(path, index=False)
    return path
