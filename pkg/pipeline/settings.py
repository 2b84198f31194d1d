"""
Pipeline settings
Every knob the CLI exposes, grouped by stage, with the module defaults
"""
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from classifier.conjugate_gradient import TrainConfig
from dataset.splitter import SplitSpec
from features.extractor import FeatureConfig
from imaging.raster import DEFAULT_THRESHOLD


class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    binarize_threshold: int = Field(DEFAULT_THRESHOLD, ge=0, le=255)
    features: FeatureConfig = Field(default_factory=FeatureConfig)
    n_hidden: Optional[int] = Field(None, ge=1, description="Hidden units, defaults to 2 * n_in")
    train: TrainConfig = Field(default_factory=TrainConfig)
    split: SplitSpec = Field(default_factory=SplitSpec)

    def hidden_width(self, n_in: int) -> int:
        return self.n_hidden or 2 * n_in
