"""Training schedulers: the per-iteration threshold lambda = F(t).

F is monotone non-decreasing from lambda0 to beta. t counts completed
reweighting rounds, so t=0 is the first round and F(0) = lambda0 for every
kind. The constant kind pins the threshold at lambda0 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError

SCHEDULE_KINDS = ("linear", "convex", "concave", "exponential", "constant")


@dataclass(frozen=True)
class ScheduleConfig:
    kind: str
    lambda0: float
    beta: float | None = None
    t_grow: int = 10
    gamma: float | None = None  # exponential only

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ConfigurationError(f"unknown schedule kind {self.kind!r}")
        if not self.lambda0 > 0.0:
            raise ConfigurationError(f"lambda0 must be > 0, got {self.lambda0}")
        if self.kind == "constant":
            if self.beta is None:
                object.__setattr__(self, "beta", self.lambda0)
        elif self.beta is None or self.beta < self.lambda0:
            raise ConfigurationError(f"beta must be >= lambda0, got beta={self.beta}")
        if self.t_grow < 1:
            raise ConfigurationError(f"t_grow must be >= 1, got {self.t_grow}")
        if self.kind == "exponential":
            if self.gamma is None or not 0.0 < self.gamma < 1.0:
                raise ConfigurationError(f"gamma must be in (0, 1), got {self.gamma}")


def threshold(cfg: ScheduleConfig, t: int) -> float:
    """Evaluate the pacing function at round t (t >= 0)."""
    if t < 0:
        raise ConfigurationError(f"iteration index must be >= 0, got {t}")
    lo, hi = cfg.lambda0, cfg.beta
    if cfg.kind == "constant":
        return lo
    if cfg.kind == "linear":
        return min(hi, lo + (hi - lo) * t / cfg.t_grow)
    if cfg.kind == "convex":
        if t > cfg.t_grow:
            return hi
        return lo + (hi - lo) * math.sin(t / cfg.t_grow * math.pi / 2.0)
    if cfg.kind == "concave":
        if t > cfg.t_grow:
            return hi
        return lo + (hi - lo) * (1.0 - math.cos(t / cfg.t_grow * math.pi / 2.0))
    # exponential: approaches beta, never reaches it
    return lo + (hi - lo) * (1.0 - cfg.gamma ** t)
