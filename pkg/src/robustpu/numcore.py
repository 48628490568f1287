"""Minimal dense numerical core.

Single-hidden-layer ReLU MLP with a sigmoid output head, weighted binary
cross-entropy with exact analytic gradients, and Adam updates with decoupled
weight decay. Everything is plain float64 numpy and single-threaded; forward
evaluation is pure, parameter updates mutate the ModelState in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import ConfigurationError, TrainingDiverged

PROB_CLAMP = 1e-7
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

PARAM_NAMES = ("w1", "b1", "w2", "b2")


@dataclass
class ModelState:
    """Parameters and optimizer moments of the two-layer classifier.

    w1 is (input_dim, hidden), b1 and w2 are (hidden,), b2 is (1,).
    adam_m / adam_v mirror the parameter shapes; step counts Adam updates.
    """

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    adam_m: dict = field(repr=False, default=None)
    adam_v: dict = field(repr=False, default=None)
    step: int = 0

    def __post_init__(self):
        if self.adam_m is None:
            self.adam_m = {k: np.zeros_like(v) for k, v in self.params().items()}
        if self.adam_v is None:
            self.adam_v = {k: np.zeros_like(v) for k, v in self.params().items()}

    @property
    def input_dim(self) -> int:
        return self.w1.shape[0]

    @property
    def hidden_width(self) -> int:
        return self.w1.shape[1]

    def params(self) -> dict:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}

    def set_param(self, name: str, value: np.ndarray) -> None:
        setattr(self, name, value)

    def copy(self) -> "ModelState":
        return ModelState(
            w1=self.w1.copy(),
            b1=self.b1.copy(),
            w2=self.w2.copy(),
            b2=self.b2.copy(),
            adam_m={k: v.copy() for k, v in self.adam_m.items()},
            adam_v={k: v.copy() for k, v in self.adam_v.items()},
            step=self.step,
        )


@dataclass
class ForwardResult:
    logits: np.ndarray        # (n,)
    hidden: np.ndarray        # (n, hidden) post-ReLU, cached for backward


def init_model(input_dim: int, hidden: int = 100, seed: int = 0) -> ModelState:
    """Variance-scaled uniform init (bound sqrt(6/(fan_in+fan_out))), zero biases."""
    if input_dim < 1 or hidden < 1:
        raise ConfigurationError(f"bad model dims: input_dim={input_dim}, hidden={hidden}")
    rng = np.random.default_rng(seed)
    bound1 = np.sqrt(6.0 / (input_dim + hidden))
    bound2 = np.sqrt(6.0 / (hidden + 1))
    return ModelState(
        w1=rng.uniform(-bound1, bound1, size=(input_dim, hidden)),
        b1=np.zeros(hidden),
        w2=rng.uniform(-bound2, bound2, size=hidden),
        b2=np.zeros(1),
    )


def _check_batch(model: ModelState, batch: np.ndarray) -> np.ndarray:
    batch = np.asarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != model.input_dim:
        raise ConfigurationError(
            f"batch shape {batch.shape} does not match input_dim {model.input_dim}"
        )
    return batch


def mlp_forward(model: ModelState, batch: np.ndarray) -> ForwardResult:
    """logits[i] = w2 . relu(x_i w1 + b1) + b2"""
    batch = _check_batch(model, batch)
    hidden = np.maximum(batch @ model.w1 + model.b1, 0.0)
    logits = hidden @ model.w2 + model.b2[0]
    return ForwardResult(logits=logits, hidden=hidden)


def predict_prob(model: ModelState, batch: np.ndarray) -> np.ndarray:
    """Positive-class probability, clamped into (0, 1) so logs stay finite."""
    logits = mlp_forward(model, batch).logits
    return np.clip(expit(logits), PROB_CLAMP, 1.0 - PROB_CLAMP)


def backprop_logits(
    model: ModelState, batch: np.ndarray, hidden: np.ndarray, dloss_dlogits: np.ndarray
) -> dict:
    """Map a gradient at the logits back to parameter gradients.

    Shared by the weighted BCE loss and the PU risk estimators, which differ
    only in how dloss_dlogits is built.
    """
    dhidden = np.outer(dloss_dlogits, model.w2)
    dhidden[hidden <= 0.0] = 0.0
    return {
        "w1": batch.T @ dhidden,
        "b1": dhidden.sum(axis=0),
        "w2": hidden.T @ dloss_dlogits,
        "b2": np.array([dloss_dlogits.sum()]),
    }


def weighted_bce_grad(
    model: ModelState,
    batch: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray,
) -> tuple[float, dict]:
    """Mean of v_i * bce(q_i, y_i) over the batch, plus exact gradients.

    q is clamped into [PROB_CLAMP, 1-PROB_CLAMP] before the logs; the gradient
    uses the unclamped sigmoid so saturated samples still push back.
    """
    batch = _check_batch(model, batch)
    labels = np.asarray(labels, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    n = batch.shape[0]
    if labels.shape != (n,) or weights.shape != (n,):
        raise ConfigurationError("labels/weights must be 1-D and match the batch length")
    if labels.size and not np.isin(labels, (0.0, 1.0)).all():
        raise ConfigurationError("labels must be 0 or 1")
    if weights.size and (weights.min() < 0.0 or weights.max() > 1.0):
        raise ConfigurationError("weights must lie in [0, 1]")

    fr = mlp_forward(model, batch)
    q = expit(fr.logits)
    qc = np.clip(q, PROB_CLAMP, 1.0 - PROB_CLAMP)
    per_sample = -labels * np.log(qc) - (1.0 - labels) * np.log(1.0 - qc)
    loss = float(np.mean(weights * per_sample)) if n else 0.0

    dlogits = weights * (q - labels) / max(n, 1)
    grads = backprop_logits(model, batch, fr.hidden, dlogits)
    return loss, grads


def adam_step(
    model: ModelState,
    grads: dict,
    learning_rate: float,
    weight_decay: float = 0.0,
) -> ModelState:
    """One bias-corrected Adam update; weight decay is decoupled shrinkage."""
    if learning_rate <= 0.0:
        raise ConfigurationError(f"learning_rate must be > 0, got {learning_rate}")
    if weight_decay < 0.0:
        raise ConfigurationError(f"weight_decay must be >= 0, got {weight_decay}")
    for name in PARAM_NAMES:
        if not np.isfinite(grads[name]).all():
            raise TrainingDiverged(f"non-finite gradient for parameter {name!r}")

    model.step += 1
    t = model.step
    bc1 = 1.0 - ADAM_BETA1 ** t
    bc2 = 1.0 - ADAM_BETA2 ** t
    for name, p in model.params().items():
        g = grads[name]
        m = model.adam_m[name]
        v = model.adam_v[name]
        m *= ADAM_BETA1
        m += (1.0 - ADAM_BETA1) * g
        v *= ADAM_BETA2
        v += (1.0 - ADAM_BETA2) * np.square(g)
        update = (m / bc1) / (np.sqrt(v / bc2) + ADAM_EPS)
        if weight_decay:
            update = update + weight_decay * p
        p -= learning_rate * update
    return model
