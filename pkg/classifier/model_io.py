"""
Model persistence
Versioned plain-text weight files plus the class-name sidecar written next to them
"""
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from classifier.mlp import MlpModel

MAGIC = "MLPCG"
FORMAT_VERSION = 1

PathLike = Union[str, Path]


def _row(values) -> str:
    return " ".join(f"{v:.17g}" for v in values)


def save_model(model: MlpModel, path: PathLike) -> Path:
    """
    Write the model as text:

        MLPCG 1
        n_in n_hidden n_out
        <n_hidden rows of w1>
        <b1>
        <n_out rows of w2>
        <b2>
    """
    path = Path(path)
    lines = [f"{MAGIC} {FORMAT_VERSION}", f"{model.n_in} {model.n_hidden} {model.n_out}"]
    lines += [_row(row) for row in model.w1]
    lines.append(_row(model.b1))
    lines += [_row(row) for row in model.w2]
    lines.append(_row(model.b2))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def load_model(path: PathLike) -> MlpModel:
    path = Path(path)
    try:
        lines = path.read_text(encoding="ascii").splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise ValueError(f"cannot read model {path}: {e}") from e

    if not lines or lines[0].split() != [MAGIC, str(FORMAT_VERSION)]:
        raise ValueError(f"{path}: not a {MAGIC} v{FORMAT_VERSION} model file")
    try:
        n_in, n_hidden, n_out = (int(v) for v in lines[1].split())
        rows = [np.array([float(v) for v in line.split()]) for line in lines[2:]]
    except (IndexError, ValueError) as e:
        raise ValueError(f"{path}: malformed model file ({e})") from e

    expected_rows = n_hidden + 1 + n_out + 1
    if len(rows) != expected_rows:
        raise ValueError(f"{path}: expected {expected_rows} weight rows, found {len(rows)}")
    try:
        return MlpModel(
            w1=np.vstack(rows[:n_hidden]),
            b1=rows[n_hidden],
            w2=np.vstack(rows[n_hidden + 1:n_hidden + 1 + n_out]),
            b2=rows[-1],
        )
    except ValueError as e:
        raise ValueError(f"{path}: inconsistent weights ({e})") from e


def labels_path(model_path: PathLike) -> Path:
    model_path = Path(model_path)
    return model_path.with_name(model_path.name + ".labels")


def report_path(model_path: PathLike) -> Path:
    model_path = Path(model_path)
    return model_path.with_name(model_path.name + ".report.txt")


def save_labels(class_names: Sequence[str], model_path: PathLike) -> Path:
    path = labels_path(model_path)
    path.write_text("".join(f"{name}\n" for name in class_names), encoding="utf-8")
    return path


def load_labels(model_path: PathLike, n_out: int) -> List[str]:
    """Class names from the sidecar, or class_<i> when it is missing or the wrong length"""
    path = labels_path(model_path)
    if path.exists():
        names = path.read_text(encoding="utf-8").splitlines()
        if len(names) == n_out:
            return names
    return [f"class_{i}" for i in range(n_out)]
