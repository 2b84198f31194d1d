"""
One-hidden-layer perceptron
Sigmoid hidden and output layers trained on the mean half squared error
"""
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.special import expit
from sklearn.metrics import accuracy_score, confusion_matrix

Dims = Tuple[int, int, int]


class MlpModel(BaseModel):
    """Weights of the network; parameters flatten as w1, b1, w2, b2 (row-major)"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @field_validator("w1", "b1", "w2", "b2", mode="before")
    @classmethod
    def _as_array(cls, value):
        arr = np.array(value, dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_shapes(self):
        if self.w1.ndim != 2 or self.w2.ndim != 2 or self.b1.ndim != 1 or self.b2.ndim != 1:
            raise ValueError("weights must be matrices and biases vectors")
        n_hidden, n_in = self.w1.shape
        n_out = self.w2.shape[0]
        if min(n_in, n_hidden, n_out) < 1:
            raise ValueError("every layer needs at least one unit")
        if self.b1.shape != (n_hidden,) or self.w2.shape != (n_out, n_hidden) or self.b2.shape != (n_out,):
            raise ValueError(
                f"inconsistent layer shapes: w1 {self.w1.shape}, b1 {self.b1.shape}, "
                f"w2 {self.w2.shape}, b2 {self.b2.shape}"
            )
        if not all(np.isfinite(p).all() for p in (self.w1, self.b1, self.w2, self.b2)):
            raise ValueError("model weights must be finite")
        return self

    @property
    def n_in(self) -> int:
        return int(self.w1.shape[1])

    @property
    def n_hidden(self) -> int:
        return int(self.w1.shape[0])

    @property
    def n_out(self) -> int:
        return int(self.w2.shape[0])

    @property
    def dims(self) -> Dims:
        return self.n_in, self.n_hidden, self.n_out

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.w1.ravel(), self.b1, self.w2.ravel(), self.b2])

    def with_parameters(self, x: np.ndarray) -> "MlpModel":
        w1, b1, w2, b2 = unpack(x, self.dims)
        return MlpModel(w1=w1, b1=b1, w2=w2, b2=b2)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MlpModel):
            return NotImplemented
        return all(
            a.shape == b.shape and np.array_equal(a, b)
            for a, b in zip((self.w1, self.b1, self.w2, self.b2), (other.w1, other.b1, other.w2, other.b2))
        )

    def __hash__(self) -> int:
        return hash((self.dims, self.flatten().tobytes()))


class Evaluation(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    accuracy: float
    confusion: np.ndarray


def parameter_count(dims: Dims) -> int:
    n_in, n_hidden, n_out = dims
    return n_hidden * n_in + n_hidden + n_out * n_hidden + n_out


def unpack(x: np.ndarray, dims: Dims) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n_in, n_hidden, n_out = dims
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (parameter_count(dims),):
        raise ValueError(f"expected {parameter_count(dims)} parameters, got {x.size}")
    i = n_hidden * n_in
    w1 = x[:i].reshape(n_hidden, n_in)
    b1 = x[i:i + n_hidden]
    i += n_hidden
    w2 = x[i:i + n_out * n_hidden].reshape(n_out, n_hidden)
    b2 = x[i + n_out * n_hidden:]
    return w1, b1, w2, b2


def init_model(n_in: int, n_hidden: int, n_out: int, seed: int) -> MlpModel:
    """Uniform weights in +-1/sqrt(fan_in), zero biases"""
    if min(n_in, n_hidden, n_out) < 1:
        raise ValueError(f"layer sizes must be >= 1, got ({n_in}, {n_hidden}, {n_out})")
    rng = np.random.default_rng(seed)
    w1 = rng.uniform(-1.0, 1.0, size=(n_hidden, n_in)) / np.sqrt(n_in)
    w2 = rng.uniform(-1.0, 1.0, size=(n_out, n_hidden)) / np.sqrt(n_hidden)
    return MlpModel(w1=w1, b1=np.zeros(n_hidden), w2=w2, b2=np.zeros(n_out))


def _check_features(features: np.ndarray, n_in: int) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.shape[-1] != n_in:
        raise ValueError(f"feature length {features.shape[-1]} does not match model input size {n_in}")
    return features


def forward_batch(model: MlpModel, features: np.ndarray) -> np.ndarray:
    """Outputs for each row of an (N, n_in) matrix"""
    features = _check_features(np.atleast_2d(features), model.n_in)
    hidden = expit(features @ model.w1.T + model.b1)
    return expit(hidden @ model.w2.T + model.b2)


def forward(model: MlpModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("forward takes a single feature vector")
    return forward_batch(model, x)[0]


def one_hot(labels, n_out: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 0 or labels.max() >= n_out):
        raise ValueError(f"labels must lie in 0..{n_out - 1}")
    targets = np.zeros((labels.size, n_out))
    targets[np.arange(labels.size), labels] = 1.0
    return targets


def flat_loss(x: np.ndarray, dims: Dims, features: np.ndarray, targets: np.ndarray) -> float:
    w1, b1, w2, b2 = unpack(x, dims)
    outputs = expit(expit(features @ w1.T + b1) @ w2.T + b2)
    return float(0.5 * np.sum((outputs - targets) ** 2) / features.shape[0])


def flat_loss_and_gradient(
    x: np.ndarray, dims: Dims, features: np.ndarray, targets: np.ndarray
) -> Tuple[float, np.ndarray]:
    """Loss and backpropagated gradient for a flattened parameter vector"""
    w1, b1, w2, b2 = unpack(x, dims)
    n = features.shape[0]
    hidden = expit(features @ w1.T + b1)
    outputs = expit(hidden @ w2.T + b2)
    error = outputs - targets
    loss = float(0.5 * np.sum(error ** 2) / n)

    delta_out = error * outputs * (1.0 - outputs) / n
    grad_w2 = delta_out.T @ hidden
    grad_b2 = delta_out.sum(axis=0)
    delta_hidden = (delta_out @ w2) * hidden * (1.0 - hidden)
    grad_w1 = delta_hidden.T @ features
    grad_b1 = delta_hidden.sum(axis=0)
    return loss, np.concatenate([grad_w1.ravel(), grad_b1, grad_w2.ravel(), grad_b2])


def _check_batch(model: MlpModel, features, targets) -> Tuple[np.ndarray, np.ndarray]:
    features = np.asarray(features, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] == 0:
        raise ValueError("empty batch")
    _check_features(features, model.n_in)
    if targets.shape != (features.shape[0], model.n_out):
        raise ValueError(f"targets must have shape ({features.shape[0]}, {model.n_out}), got {targets.shape}")
    return features, targets


def loss_and_gradient(model: MlpModel, features, targets) -> Tuple[float, np.ndarray]:
    """Mean over the batch of 0.5*||y - t||^2 and its gradient in flatten() order"""
    features, targets = _check_batch(model, features, targets)
    return flat_loss_and_gradient(model.flatten(), model.dims, features, targets)


def predict(model: MlpModel, x: np.ndarray) -> int:
    """Index of the largest output, lowest index on ties"""
    return int(np.argmax(forward(model, x)))


def predict_batch(model: MlpModel, features: np.ndarray) -> np.ndarray:
    return np.argmax(forward_batch(model, features), axis=1)


def evaluate(model: MlpModel, features, labels) -> Evaluation:
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=int)
    if features.ndim != 2 or features.shape[0] == 0:
        raise ValueError("cannot evaluate on an empty set")
    if labels.shape != (features.shape[0],):
        raise ValueError(f"expected {features.shape[0]} labels, got {labels.size}")
    if labels.min() < 0 or labels.max() >= model.n_out:
        raise ValueError(f"labels must lie in 0..{model.n_out - 1}")
    predicted = predict_batch(model, features)
    return Evaluation(
        accuracy=float(accuracy_score(labels, predicted)),
        confusion=confusion_matrix(labels, predicted, labels=np.arange(model.n_out)),
    )
