"""The iterative reweighted training loop.

One run is: warm-start the classifier with non-negative PU risk minimization,
then repeat for up to `iterations` rounds: (1) score every labeled-positive
and unlabeled sample for hardness under the current model, (2) convert
hardness to per-sample weights through the scheduled threshold, (3) take
`epochs_per_iteration` passes of weighted supervised training that treats the
unlabeled pool as negatives. Validation accuracy after each round drives
early stopping and best-checkpoint selection.

Training code only ever sees a TrainView (features, no hidden labels); the
`on_iteration` hook hands the raw weight vectors to the caller so a harness
can correlate them with oracle labels out-of-band.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import numcore
from .errors import ConfigurationError, ScheduleTooStrict, UsageError
from .hardness import METRICS, measure_hardness
from .pacing import ScheduleConfig, threshold
from .risk import RiskConfig, pretrain
from .weighting import MAPPINGS, map_weights


@dataclass(frozen=True)
class TrainConfig:
    pi: float
    schedule_p: ScheduleConfig
    schedule_u: ScheduleConfig | None = None  # None: share schedule_p
    tau: float = 1.0
    metric: str = "logistic"
    mapping: str = "welsch"
    iterations: int = 20
    epochs_per_iteration: int = 20
    warmup: int = 0
    learning_rate: float = 1e-3
    weight_decay: float = 0.0
    batch_size: int = 64
    patience: int = 5
    hidden: int = 100
    pretrain_epochs: int = 100
    pretrain_lr: float | None = None  # None: reuse learning_rate
    defense_step: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.pi < 1.0:
            raise ConfigurationError(f"pi must be in (0, 1), got {self.pi}")
        if self.tau <= 0:
            raise ConfigurationError(f"tau must be positive, got {self.tau}")
        if self.metric not in METRICS:
            raise ConfigurationError(f"unknown hardness metric {self.metric!r}")
        if self.mapping not in MAPPINGS:
            raise ConfigurationError(f"unknown weight mapping {self.mapping!r}")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        for name in ("epochs_per_iteration", "warmup", "pretrain_epochs"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")
        if self.patience < 1:
            raise ConfigurationError("patience must be >= 1")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if self.learning_rate <= 0 or (self.pretrain_lr is not None and self.pretrain_lr <= 0):
            raise ConfigurationError("learning rates must be positive")
        if self.weight_decay < 0:
            raise ConfigurationError("weight_decay must be >= 0")
        if self.hidden < 1:
            raise ConfigurationError("hidden must be >= 1")
        if self.schedule_u is None:
            object.__setattr__(self, "schedule_u", self.schedule_p)


@dataclass
class IterationRecord:
    iteration: int
    lambda_p: float
    lambda_u: float
    train_loss: float
    val_accuracy: float
    mean_weight_p: float
    mean_weight_u: float
    zero_weight_fraction: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class TrainResult:
    model: numcore.ModelState          # best-validation checkpoint
    records: list
    best_iteration: int
    best_val_accuracy: float
    final_weights_p: np.ndarray        # weights used in the last executed round
    final_weights_u: np.ndarray
    pretrain_val_accuracy: float


def accuracy(model: numcore.ModelState, features: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of correct thresholded predictions; probability >= 0.5 is positive."""
    if len(features) == 0:
        raise UsageError("cannot score an empty evaluation set")
    q = numcore.predict_prob(model, features)
    return float(np.mean((q >= 0.5).astype(np.uint8) == labels))


def weighted_epoch(model, features, labels, weights, batch_size, learning_rate,
                   weight_decay, rng) -> float:
    """One shuffled pass of weighted BCE minibatch steps; returns the epoch loss.

    The epoch loss is the sample-count weighted mean of per-batch losses, i.e.
    the mean of w_i * loss_i over the whole pass.
    """
    n = len(features)
    order = rng.permutation(n)
    total = 0.0
    for start in range(0, n, batch_size):
        idx = order[start : start + batch_size]
        loss, grads = numcore.weighted_bce_grad(model, features[idx], labels[idx], weights[idx])
        numcore.adam_step(model, grads, learning_rate, weight_decay)
        total += loss * len(idx)
    return total / max(n, 1)


def _fresh_optimizer(model: numcore.ModelState) -> numcore.ModelState:
    """Keep the parameters, drop Adam moments and the step counter."""
    return numcore.ModelState(
        w1=model.w1.copy(), b1=model.b1.copy(), w2=model.w2.copy(), b2=model.b2.copy()
    )


def robust_pu_train(
    view,
    config: TrainConfig,
    base_model: numcore.ModelState | None = None,
    on_iteration: Callable[[IterationRecord, np.ndarray, np.ndarray, numcore.ModelState], None] | None = None,
) -> TrainResult:
    """Run the full pipeline on a TrainView (or any object with its fields).

    Early stopping: a round whose validation accuracy does not strictly beat
    the best seen increments a stall counter; `patience` consecutive stalls
    end the run. The returned model is the best-validation checkpoint (ties
    resolved toward the earliest round).
    """
    x_p = np.asarray(view.x_p, dtype=np.float64)
    x_u = np.asarray(view.x_u, dtype=np.float64)
    if x_p.ndim != 2 or x_u.ndim != 2 or x_p.shape[1] != x_u.shape[1]:
        raise ConfigurationError("x_p and x_u must be 2-d with matching feature width")
    if len(x_p) == 0 or len(x_u) == 0:
        raise ConfigurationError("both the positive and unlabeled pools must be non-empty")

    if base_model is not None:
        model = base_model.copy()
    else:
        model = numcore.init_model(x_p.shape[1], hidden=config.hidden, seed=config.seed)

    risk_cfg = RiskConfig(pi=config.pi, defense_step=config.defense_step)
    if config.pretrain_epochs > 0:
        pretrain(
            model, x_p, x_u, risk_cfg,
            epochs=config.pretrain_epochs,
            batch_size=config.batch_size,
            learning_rate=config.pretrain_lr or config.learning_rate,
            weight_decay=config.weight_decay,
            seed=config.seed,
        )
        model = _fresh_optimizer(model)
    pretrain_val = accuracy(model, view.val_features, view.val_labels)

    features = np.vstack([x_p, x_u])
    labels = np.concatenate([
        np.ones(len(x_p), dtype=np.uint8), np.zeros(len(x_u), dtype=np.uint8)
    ])

    records: list[IterationRecord] = []
    best_model = model.copy()
    best_acc = -1.0
    best_iter = -1
    stall = 0
    w_p = np.ones(len(x_p))
    w_u = np.ones(len(x_u))

    for t in range(config.iterations):
        h_p = measure_hardness(model, x_p, "positive", config.metric, config.tau)
        h_u = measure_hardness(model, x_u, "unlabeled", config.metric, config.tau)
        lam_p = threshold(config.schedule_p, t)
        lam_u = threshold(config.schedule_u, t)
        if t < config.warmup:
            w_p = np.ones(len(x_p))
            w_u = np.ones(len(x_u))
        else:
            w_p = map_weights(h_p, lam_p, config.mapping).values
            w_u = map_weights(h_u, lam_u, config.mapping).values
        if w_p.sum() + w_u.sum() == 0.0:
            raise ScheduleTooStrict(
                f"iteration {t}: every sample weight is zero "
                f"(lambda_p={lam_p:.6g}, lambda_u={lam_u:.6g})"
            )

        weights = np.concatenate([w_p, w_u])
        train_loss = float("nan")
        for epoch in range(config.epochs_per_iteration):
            rng = np.random.default_rng([config.seed, t, epoch])
            train_loss = weighted_epoch(
                model, features, labels, weights,
                config.batch_size, config.learning_rate, config.weight_decay, rng,
            )

        val_acc = accuracy(model, view.val_features, view.val_labels)
        record = IterationRecord(
            iteration=t,
            lambda_p=float(lam_p),
            lambda_u=float(lam_u),
            train_loss=float(train_loss),
            val_accuracy=val_acc,
            mean_weight_p=float(w_p.mean()),
            mean_weight_u=float(w_u.mean()),
            zero_weight_fraction=float(np.mean(weights == 0.0)),
        )
        records.append(record)
        if on_iteration is not None:
            on_iteration(record, w_p, w_u, model)

        if val_acc > best_acc:
            best_acc = val_acc
            best_model = model.copy()
            best_iter = t
            stall = 0
        else:
            stall += 1
            if stall >= config.patience:
                break

    return TrainResult(
        model=best_model,
        records=records,
        best_iteration=best_iter,
        best_val_accuracy=best_acc,
        final_weights_p=w_p,
        final_weights_u=w_u,
        pretrain_val_accuracy=pretrain_val,
    )


def save_checkpoint(model: numcore.ModelState, path) -> None:
    """Parameters, Adam moments, and step counter in one .npz file."""
    arrays = {name: getattr(model, name) for name in numcore.PARAM_NAMES}
    for name in numcore.PARAM_NAMES:
        arrays[f"m_{name}"] = model.adam_m[name]
        arrays[f"v_{name}"] = model.adam_v[name]
    arrays["step"] = np.asarray(model.step, dtype=np.int64)
    with open(path, "wb") as f:
        np.savez(f, **arrays)


def load_checkpoint(path) -> numcore.ModelState:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"checkpoint not found: {path}")
    with np.load(path) as z:
        model = numcore.ModelState(
            w1=z["w1"], b1=z["b1"], w2=z["w2"], b2=z["b2"]
        )
        for name in numcore.PARAM_NAMES:
            model.adam_m[name] = z[f"m_{name}"]
            model.adam_v[name] = z[f"v_{name}"]
        model.step = int(z["step"])
    return model


def dump_records(records, path) -> None:
    """Iteration records as JSON lines, one object per round."""
    with open(path, "w") as f:
        for r in records:
            f.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
