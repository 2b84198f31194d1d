"""Per-class seeded train/test split"""
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from dataset.loader import LabeledSample


class SplitSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    train_per_class: int = Field(30, ge=1)
    test_per_class: int = Field(10, ge=1)
    seed: int = Field(1, ge=0)


def split(
    samples: Sequence[LabeledSample],
    spec: SplitSpec,
    class_names: Optional[Sequence[str]] = None,
) -> Tuple[List[LabeledSample], List[LabeledSample]]:
    """
    Shuffle each class with its own seeded generator, then take the first
    train_per_class samples for training and the next test_per_class for testing.
    Leftover samples are unused. Output is ordered by class.
    """
    by_class: Dict[int, List[LabeledSample]] = defaultdict(list)
    for sample in samples:
        by_class[sample.label].append(sample)

    labels = range(len(class_names)) if class_names is not None else sorted(by_class)
    needed = spec.train_per_class + spec.test_per_class
    train: List[LabeledSample] = []
    test: List[LabeledSample] = []
    for label in labels:
        members = by_class.get(label, [])
        if len(members) < needed:
            name = class_names[label] if class_names is not None else str(label)
            raise ValueError(f"class {name} has {len(members)} samples, needs {needed}")
        order = np.random.default_rng([spec.seed, label]).permutation(len(members))
        train += [members[i] for i in order[:spec.train_per_class]]
        test += [members[i] for i in order[spec.train_per_class:needed]]
    return train, test
