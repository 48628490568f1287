"""Hardness-to-weight mappings.

The default mapping is the Welsch minimizer v = exp(-d / lambda^2), which
keeps every weight strictly positive and shrinks smoothly with hardness. The
two ablation mappings are hard thresholding (v = 1 if d < lambda else 0) and
the soft linear ramp v = max(0, 1 - d / lambda). All three are non-increasing
in d and non-decreasing in lambda, so relaxing the threshold over iterations
only ever admits more of each sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .hardness import HardnessVector

MAPPINGS = ("welsch", "hard", "linear")


@dataclass
class WeightVector:
    group: str
    values: np.ndarray
    mapping: str
    lam: float


def map_weights(hardness: HardnessVector, lam: float, mapping: str = "welsch") -> WeightVector:
    if mapping not in MAPPINGS:
        raise ConfigurationError(f"unknown weight mapping {mapping!r}")
    if not lam > 0.0:
        raise ConfigurationError(f"threshold lambda must be > 0, got {lam}")
    d = hardness.values
    if mapping == "welsch":
        values = np.exp(-d / lam**2)
    elif mapping == "hard":
        values = (d < lam).astype(np.float64)
    else:
        values = np.maximum(0.0, 1.0 - d / lam)
    return WeightVector(group=hardness.group, values=values, mapping=mapping, lam=lam)
