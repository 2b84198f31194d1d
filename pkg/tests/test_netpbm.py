import numpy as np
import pytest

from imaging.netpbm import read_raster, write_pbm
from tests.conftest import raster


def test_write_then_read_preserves_pixels(tmp_path):
    img = raster(
        "#..#",
        ".##.",
        "#..#",
    )
    path = write_pbm(img, tmp_path / "glyph.pbm")
    assert path.read_bytes().startswith(b"P4")
    assert read_raster(path) == img


def test_plain_pbm(tmp_path):
    path = tmp_path / "plain.pbm"
    path.write_bytes(b"P1\n3 2\n1 0 0\n0 1 1\n")
    assert read_raster(path) == raster("#..", ".##")


def test_plain_pgm_goes_through_threshold(tmp_path):
    path = tmp_path / "gray.pgm"
    path.write_bytes(b"P2\n3 1\n255\n0 127 200\n")
    assert read_raster(path, threshold=128) == raster("##.")
    assert read_raster(path, threshold=100) == raster("#..")


def test_binary_pgm(tmp_path):
    path = tmp_path / "gray.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 255, 10]))
    assert np.array_equal(read_raster(path).pixels, [[1, 0], [0, 1]])


def test_garbage_file(tmp_path):
    path = tmp_path / "broken.pbm"
    path.write_bytes(b"not an image")
    with pytest.raises(ValueError, match="cannot read image"):
        read_raster(path)
