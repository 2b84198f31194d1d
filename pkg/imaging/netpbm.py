"""
Netpbm image I/O
PBM files load as stroke bitmaps, PGM (and other grayscale) files go through binarize
"""
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from imaging.raster import DEFAULT_THRESHOLD, BinaryRaster, binarize

PathLike = Union[str, Path]


def read_raster(path: PathLike, threshold: int = DEFAULT_THRESHOLD) -> BinaryRaster:
    """Read a PBM (P1/P4) or PGM (P2/P5) file as a stroke raster"""
    path = Path(path)
    try:
        with Image.open(path) as image:
            image.load()
            if image.mode == "1":
                # mode "1" stores white as True; PBM ink is black
                return BinaryRaster(pixels=~np.asarray(image, dtype=bool))
            gray = np.asarray(image.convert("L"))
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as e:
        raise ValueError(f"cannot read image {path}: {e}") from e
    return binarize(gray, threshold)


def write_pbm(img: BinaryRaster, path: PathLike) -> Path:
    """Write a binary P4 bitmap (stroke pixels black)"""
    path = Path(path)
    Image.fromarray(img.pixels == 0).save(path, format="PPM")
    return path
