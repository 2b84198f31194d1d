import numpy as np
import pandas as pd
import pytest

from dataset.loader import LabeledSample, export_manifest, load_dataset, manifest_frame, write_dataset
from dataset.splitter import SplitSpec, split
from dataset.synthetic import (
    MAX_JITTER,
    generate_synthetic,
    load_prototypes,
    max_classes,
    perturb_strokes,
    synthetic_class_names,
)
from imaging.netpbm import write_pbm
from imaging.raster import BinaryRaster, crop_to_content
from tests.conftest import raster


def fake_samples(n_classes, per_class):
    return [
        LabeledSample(image=BinaryRaster.blank(1, 1), label=label, source_id=f"c{label}/{i:03d}")
        for label in range(n_classes)
        for i in range(per_class)
    ]


class TestLoad:
    def test_classes_in_directory_order(self, tmp_path):
        for name, files in {"kha": ["a.pbm"], "ka": ["b.pbm", "a.pbm"]}.items():
            (tmp_path / name).mkdir()
            for f in files:
                write_pbm(raster("#.", ".#"), tmp_path / name / f)
        samples, names = load_dataset(tmp_path, workers=2)
        assert names == ["ka", "kha"]
        assert [(s.label, s.source_id) for s in samples] == [(0, "ka/a.pbm"), (0, "ka/b.pbm"), (1, "kha/a.pbm")]
        assert all(s.image == raster("#.", ".#") for s in samples)

    def test_ignores_other_files(self, tmp_path):
        (tmp_path / "ka").mkdir()
        write_pbm(raster("#"), tmp_path / "ka" / "x.pbm")
        (tmp_path / "ka" / "notes.txt").write_text("scan log")
        samples, _ = load_dataset(tmp_path)
        assert len(samples) == 1

    def test_no_classes(self, tmp_path):
        with pytest.raises(ValueError, match="no classes found"):
            load_dataset(tmp_path)

    def test_empty_class(self, tmp_path):
        (tmp_path / "ka").mkdir()
        with pytest.raises(ValueError, match="class 'ka' has no samples"):
            load_dataset(tmp_path)

    def test_root_must_be_directory(self, tmp_path):
        with pytest.raises(ValueError):
            load_dataset(tmp_path / "missing")

    def test_unreadable_image(self, tmp_path):
        (tmp_path / "ka").mkdir()
        (tmp_path / "ka" / "broken.pbm").write_bytes(b"P4\n")
        with pytest.raises(ValueError, match="cannot read image"):
            load_dataset(tmp_path)

    def test_write_then_load(self, tmp_path):
        samples, names = generate_synthetic(3, 2, seed=5)
        write_dataset(samples, names, tmp_path)
        loaded, loaded_names = load_dataset(tmp_path)
        assert loaded_names == names
        assert [s.label for s in loaded] == [s.label for s in samples]
        assert [s.image for s in loaded] == [s.image for s in samples]

    def test_repeatable(self, tmp_path):
        samples, names = generate_synthetic(2, 3, seed=1)
        write_dataset(samples, names, tmp_path)
        first, _ = load_dataset(tmp_path, workers=1)
        second, _ = load_dataset(tmp_path, workers=4)
        assert first == second


class TestSplit:
    def test_sizes(self):
        train, test = split(fake_samples(25, 40), SplitSpec())
        assert len(train) == 750
        assert len(test) == 250
        assert all(sum(s.label == c for s in train) == 30 for c in range(25))

    def test_disjoint(self):
        train, test = split(fake_samples(4, 40), SplitSpec())
        assert not {s.source_id for s in train} & {s.source_id for s in test}

    def test_seeded(self):
        samples = fake_samples(3, 50)
        first = split(samples, SplitSpec(seed=4))
        again = split(samples, SplitSpec(seed=4))
        other = split(samples, SplitSpec(seed=5))
        assert first == again
        assert [s.source_id for s in first[0]] != [s.source_id for s in other[0]]

    def test_leftovers_unused(self):
        train, test = split(fake_samples(2, 12), SplitSpec(train_per_class=5, test_per_class=3))
        assert (len(train), len(test)) == (10, 6)

    def test_short_class_is_named(self):
        samples = fake_samples(2, 40)[:45]
        with pytest.raises(ValueError, match="class kha has 5 samples, needs 40"):
            split(samples, SplitSpec(), class_names=["ka", "kha"])

    def test_missing_class_is_named(self):
        with pytest.raises(ValueError, match="class ga has 0 samples"):
            split(fake_samples(2, 40), SplitSpec(), class_names=["ka", "kha", "ga"])


class TestSynthetic:
    def test_counts_and_names(self):
        samples, names = generate_synthetic(3, 4, seed=1)
        assert names == ["00_ka", "01_kha", "02_ga"]
        assert len(samples) == 12
        assert [s.label for s in samples] == [0] * 4 + [1] * 4 + [2] * 4
        assert samples[5].source_id == "synthetic/01_kha/0001"

    def test_deterministic(self):
        first, _ = generate_synthetic(4, 3, seed=9)
        second, _ = generate_synthetic(4, 3, seed=9)
        other, _ = generate_synthetic(4, 3, seed=10)
        assert first == second
        assert [s.image for s in first] != [s.image for s in other]

    def test_sample_independent_of_count(self):
        few, _ = generate_synthetic(2, 2, seed=3)
        many, _ = generate_synthetic(5, 6, seed=3)
        assert few[0].image == many[0].image
        assert few[3].image == many[7].image

    def test_every_sample_has_ink(self):
        samples, _ = generate_synthetic(max_classes(), 2, seed=2)
        for sample in samples:
            assert (sample.image.height, sample.image.width) == (140, 140)
            assert crop_to_content(sample.image).stroke_count > 0

    def test_jitter_is_bounded(self):
        rng = np.random.default_rng(0)
        for proto in load_prototypes():
            strokes = [s.vertices() for s in proto.strokes]
            moved = perturb_strokes(strokes, rng)
            for before, after in zip(strokes, moved):
                assert np.linalg.norm(after - before, axis=1).max() <= MAX_JITTER + 1e-9

    def test_twenty_five_classes(self):
        assert max_classes() == 25
        assert len(set(synthetic_class_names(25))) == 25
        assert synthetic_class_names(25) == sorted(synthetic_class_names(25))

    @pytest.mark.parametrize("kwargs", [
        {"n_classes": 26, "per_class": 1, "seed": 1},
        {"n_classes": 0, "per_class": 1, "seed": 1},
        {"n_classes": 2, "per_class": 0, "seed": 1},
        {"n_classes": 2, "per_class": 1, "seed": -1},
    ])
    def test_rejects_bad_arguments(self, kwargs):
        with pytest.raises(ValueError):
            generate_synthetic(**kwargs)


class TestManifest:
    def test_frame(self):
        samples, names = generate_synthetic(2, 2, seed=1)
        frame = manifest_frame(samples, names)
        assert list(frame.columns) == ["source_id", "class_index", "class_name"]
        assert frame["class_name"].tolist() == ["00_ka", "00_ka", "01_kha", "01_kha"]

    def test_export(self, tmp_path):
        samples, names = generate_synthetic(2, 1, seed=1)
        path = export_manifest(samples, names, tmp_path / "manifest.csv")
        frame = pd.read_csv(path)
        assert frame["source_id"].tolist() == ["synthetic/00_ka/0000", "synthetic/01_kha/0000"]
        assert frame["class_index"].tolist() == [0, 1]
