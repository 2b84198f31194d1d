"""
Model fitting and parameter sweeps
Shared by the train/sweep commands and the end-to-end checks
"""
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from classifier.conjugate_gradient import CgResult, cg_train
from classifier.mlp import MlpModel, evaluate, init_model, one_hot
from features.extractor import FeatureConfig
from pipeline import config
from pipeline.log import get_logger
from pipeline.settings import PipelineConfig
from pipeline.stages import PreparedGlyph, features_from_prepared

logger = get_logger("training")

SWEEP_COLUMNS = ["grid_n", "norm_factor", "train_accuracy", "test_accuracy", "final_loss", "iterations"]


class TrainingOutcome(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: MlpModel
    result: CgResult
    train_accuracy: float


def fit(features: np.ndarray, labels: np.ndarray, n_classes: int, settings: PipelineConfig) -> TrainingOutcome:
    """Initialise from the training seed and run CG on the full batch"""
    n_in = features.shape[1]
    model = init_model(n_in, settings.hidden_width(n_in), n_classes, settings.train.seed)
    model, result = cg_train(model, features, one_hot(labels, n_classes), settings.train)
    return TrainingOutcome(
        model=model,
        result=result,
        train_accuracy=evaluate(model, features, labels).accuracy,
    )


def training_report(outcome: TrainingOutcome, settings: PipelineConfig) -> Dict[str, str]:
    model, result = outcome.model, outcome.result
    return {
        "n_in": str(model.n_in),
        "n_hidden": str(model.n_hidden),
        "n_out": str(model.n_out),
        "grid_n": str(settings.features.grid_n),
        "norm_factor": f"{settings.features.norm_factor:g}",
        "iterations": str(result.iterations),
        "final_loss": f"{result.loss:.17g}",
        "final_grad_norm": f"{result.grad_norm:.17g}",
        "converged": "true" if result.converged else "false",
        "train_accuracy": f"{outcome.train_accuracy:.4f}",
    }


def write_report(report: Dict[str, str], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text("".join(f"{key} {value}\n" for key, value in report.items()), encoding="utf-8")
    return path


def run_sweep(
    train_glyphs: Sequence[PreparedGlyph],
    train_labels: np.ndarray,
    test_glyphs: Sequence[PreparedGlyph],
    test_labels: np.ndarray,
    n_classes: int,
    grids: Sequence[int],
    norms: Sequence[float],
    settings: PipelineConfig,
    workers: int = config.MAX_WORKERS,
    on_result: Optional[Callable[[Dict], None]] = None,
) -> pd.DataFrame:
    """Train and score one model per (grid_n, norm_factor) pair on a fixed split"""
    rows: List[Dict] = []
    for grid_n in grids:
        for norm_factor in norms:
            feature_config = FeatureConfig(
                **{**settings.features.model_dump(), "grid_n": grid_n, "norm_factor": norm_factor}
            )
            run_settings = settings.model_copy(update={"features": feature_config})
            train_features = features_from_prepared(train_glyphs, feature_config, workers)
            test_features = features_from_prepared(test_glyphs, feature_config, workers)
            outcome = fit(train_features, train_labels, n_classes, run_settings)
            row = {
                "grid_n": grid_n,
                "norm_factor": norm_factor,
                "train_accuracy": outcome.train_accuracy,
                "test_accuracy": evaluate(outcome.model, test_features, test_labels).accuracy,
                "final_loss": outcome.result.loss,
                "iterations": outcome.result.iterations,
            }
            logger.info(
                f"grid {grid_n} norm {norm_factor:g}: train {row['train_accuracy']:.4f}, test {row['test_accuracy']:.4f}"
            )
            rows.append(row)
            if on_result is not None:
                on_result(row)
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)
