"""
Conjugate-gradient training
Polak-Ribiere (plus) directions with restarts and a bracketed golden-section line search;
no learning rate, the step length along each direction comes from the line search
"""
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from classifier.mlp import MlpModel, flat_loss, flat_loss_and_gradient
from pipeline.log import get_logger

logger = get_logger("cg")

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
LOG_EVERY = 50

LossFn = Callable[[np.ndarray], float]
LossGradFn = Callable[[np.ndarray], Tuple[float, np.ndarray]]
LineFn = Callable[[float], float]


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_iters: int = Field(500, ge=0)
    grad_tol: float = Field(1e-6, gt=0, description="Stop once ||g|| drops below this")
    restart_every: Optional[int] = Field(None, ge=1, description="Defaults to the parameter count")
    line_search_tol: float = Field(1e-4, gt=0)
    line_search_max_evals: int = Field(40, ge=4, description="Counts f(0) and every probe inside the bracket")
    alpha_max: float = Field(1.0, gt=0)
    alpha_cap: float = Field(1024.0, gt=0)
    seed: int = Field(1, ge=0)


class CgState(BaseModel):
    """Optimizer state handed to callbacks and step rules"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    x: np.ndarray
    g: np.ndarray
    p: np.ndarray
    loss: float
    alpha: float
    beta: float
    iter: int
    restarted: bool


class TraceEntry(BaseModel):
    iter: int
    loss: float
    grad_norm: float
    alpha: float
    beta: float
    restarted: bool


class CgResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    x: np.ndarray
    loss: float
    grad_norm: float
    iterations: int
    converged: bool
    trace: List[TraceEntry]


StepRule = Callable[[LineFn, CgState, TrainConfig], float]


def _finite(value: float) -> float:
    if not math.isfinite(value):
        raise FloatingPointError("divergent objective")
    return value


def line_search(f: LineFn, alpha_max: float, cfg: TrainConfig) -> float:
    """
    Golden-section search for the minimum of f on [0, alpha_max].

    Returns the best alpha seen, or 0.0 when nothing improved on f(0), so the
    result always satisfies f(alpha) <= f(0).

    line_search_max_evals bounds every call of f made here, f(0) and the three
    opening probes included. Bracket expansion in expand_bracket is not charged
    against it; that loop is bounded by alpha_cap instead.
    """
    if alpha_max <= 0:
        raise ValueError("alpha_max must be positive")
    f0 = _finite(f(0.0))
    best_alpha, best_value = 0.0, f0
    evals = 1

    def probe(alpha: float) -> float:
        nonlocal best_alpha, best_value, evals
        value = _finite(f(alpha))
        evals += 1
        if value < best_value:
            best_alpha, best_value = alpha, value
        return value

    lo, hi = 0.0, alpha_max
    probe(hi)
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = probe(c), probe(d)
    while hi - lo >= cfg.line_search_tol and evals < cfg.line_search_max_evals:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = probe(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = probe(d)
    return best_alpha


def expand_bracket(f: LineFn, cfg: TrainConfig) -> float:
    """Double the upper bound while f still decreases at the boundary"""
    hi = cfg.alpha_max
    prev = _finite(f(0.0))
    current = _finite(f(hi))
    while current < prev and hi * 2.0 <= cfg.alpha_cap:
        prev = current
        hi *= 2.0
        current = _finite(f(hi))
    return hi


def golden_step(f: LineFn, state: CgState, cfg: TrainConfig) -> float:
    return line_search(f, expand_bracket(f, cfg), cfg)


def minimize(
    loss_and_grad: LossGradFn,
    x0: np.ndarray,
    cfg: TrainConfig,
    loss: Optional[LossFn] = None,
    step_rule: Optional[StepRule] = None,
    callback: Optional[Callable[[CgState], None]] = None,
) -> CgResult:
    """
    Nonlinear conjugate gradient.

    ``loss`` evaluates the objective alone for the line search and defaults to
    the first element of ``loss_and_grad``. The direction is reset to the
    steepest descent -g on iteration 0, every ``restart_every`` iterations,
    whenever beta clips to zero and whenever the new direction is not a descent
    direction.
    """
    loss = loss or (lambda x: loss_and_grad(x)[0])
    step_rule = step_rule or golden_step
    x = np.array(x0, dtype=np.float64)
    restart_every = cfg.restart_every or x.size

    value, g = loss_and_grad(x)
    if not math.isfinite(value):
        raise FloatingPointError("training diverged")
    p = -g
    alpha, beta, restarted = 0.0, 0.0, True
    trace: List[TraceEntry] = []
    k = 0
    converged = False

    while True:
        grad_norm = float(np.linalg.norm(g))
        trace.append(TraceEntry(iter=k, loss=value, grad_norm=grad_norm, alpha=alpha, beta=beta, restarted=restarted))
        if callback is not None:
            callback(CgState(x=x, g=g, p=p, loss=value, alpha=alpha, beta=beta, iter=k, restarted=restarted))
        if k % LOG_EVERY == 0:
            logger.info(f"iter {k}: loss {value:.6g}, |g| {grad_norm:.3g}")
        if grad_norm < cfg.grad_tol:
            converged = True
            break
        if k >= cfg.max_iters:
            break

        cache = {0.0: value}
        base, direction = x, p

        def along(a: float) -> float:
            if a not in cache:
                cache[a] = loss(base + a * direction)
            return cache[a]

        state = CgState(x=x, g=g, p=p, loss=value, alpha=alpha, beta=beta, iter=k, restarted=restarted)
        try:
            alpha = float(step_rule(along, state, cfg))
        except FloatingPointError as e:
            raise FloatingPointError("training diverged") from e
        if alpha <= 0.0 and restarted:
            logger.debug(f"iter {k}: no decrease along the steepest descent direction, stopping")
            break
        k += 1

        if alpha <= 0.0:
            logger.debug(f"iter {k}: line search fell back to alpha=0, restarting")
            p, beta, restarted = -g, 0.0, True
            continue

        x_new = x + alpha * p
        value_new, g_new = loss_and_grad(x_new)
        if not math.isfinite(value_new) or not np.isfinite(g_new).all():
            raise FloatingPointError("training diverged")

        beta = max(0.0, float(g_new @ (g_new - g)) / float(g @ g))
        restarted = beta == 0.0 or k % restart_every == 0
        if not restarted:
            p_new = -g_new + beta * p
            restarted = float(p_new @ g_new) >= 0.0
        if restarted:
            beta = 0.0
            p_new = -g_new
        x, g, p, value = x_new, g_new, p_new, value_new

    logger.info(
        f"cg stopped after {k} iterations: loss {value:.6g}, |g| {trace[-1].grad_norm:.3g}, converged={converged}"
    )
    return CgResult(
        x=x,
        loss=value,
        grad_norm=trace[-1].grad_norm,
        iterations=k,
        converged=converged,
        trace=trace,
    )


def cg_train(
    model: MlpModel,
    features: np.ndarray,
    targets: np.ndarray,
    cfg: TrainConfig,
    callback: Optional[Callable[[CgState], None]] = None,
) -> Tuple[MlpModel, CgResult]:
    """Full-batch CG on the mean half squared error; returns the trained model and its trace"""
    features = np.asarray(features, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] == 0:
        raise ValueError("empty training set")
    if features.shape[1] != model.n_in:
        raise ValueError(f"feature length {features.shape[1]} does not match model input size {model.n_in}")
    if targets.shape != (features.shape[0], model.n_out):
        raise ValueError(f"targets must have shape ({features.shape[0]}, {model.n_out}), got {targets.shape}")

    dims = model.dims
    result = minimize(
        lambda x: flat_loss_and_gradient(x, dims, features, targets),
        model.flatten(),
        cfg,
        loss=lambda x: flat_loss(x, dims, features, targets),
        callback=callback,
    )
    return model.with_parameters(result.x), result
