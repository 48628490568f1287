"""Per-sample hardness under the pseudo label.

Labeled positives get pseudo label +1, unlabeled samples -1. Hardness is the
surrogate loss of the current model against that pseudo label, evaluated in
one full pass over the group (no minibatch noise): low hardness marks easy /
clean samples, high hardness marks likely label noise.

Two metrics: "logistic" d = log(1 + exp(-y~ z / tau)) is unbounded and smooth;
"sigmoid" d = sigmoid(-y~ z / tau) is bounded in (0, 1). Both rank samples
identically for a fixed group and temperature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ConfigurationError
from .numcore import ModelState, mlp_forward

GROUPS = ("positive", "unlabeled")
METRICS = ("logistic", "sigmoid")


@dataclass
class HardnessVector:
    group: str
    values: np.ndarray
    metric: str
    tau: float


def measure_hardness(
    model: ModelState,
    features: np.ndarray,
    group: str,
    metric: str = "logistic",
    tau: float = 1.0,
) -> HardnessVector:
    if group not in GROUPS:
        raise ConfigurationError(f"unknown sample group {group!r}")
    if metric not in METRICS:
        raise ConfigurationError(f"unknown hardness metric {metric!r}")
    if not tau > 0.0:
        raise ConfigurationError(f"temperature must be > 0, got {tau}")

    pseudo = 1.0 if group == "positive" else -1.0
    z = mlp_forward(model, features).logits
    margin = -pseudo * z / tau
    if metric == "logistic":
        values = np.logaddexp(0.0, margin)  # softplus, overflow-safe
    else:
        values = expit(margin)
    return HardnessVector(group=group, values=values, metric=metric, tau=tau)
