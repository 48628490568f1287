"""PU risk estimators: PN (treat unlabeled as negative), uPU, nnPU.

uPU and nnPU use the sigmoid surrogate l(z, t) = sigmoid(-t z) with t = +/-1
and a known class prior pi:

    upu  = pi * R_p_pos + R_u_neg - pi * R_p_neg
    nnpu = pi * R_p_pos + max(0, R_u_neg - pi * R_p_neg)

where R_p_pos / R_p_neg are mean surrogate losses on the positive set against
labels +1 / -1 and R_u_neg is the mean surrogate loss on the unlabeled set
against -1. uPU is unbiased but can go negative under a flexible model; nnPU
clamps the implied negative-class risk at zero.

The PN baseline risk is plain mean BCE with labels 1 on the positive set and
0 on the unlabeled set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit

from . import numcore
from .errors import ConfigurationError
from .numcore import ModelState, backprop_logits, mlp_forward

PRETRAIN_STREAM = 0x5247  # rng stream tag for pretraining epoch shuffles


@dataclass(frozen=True)
class RiskConfig:
    pi: float
    # when the nnPU clamp is active: follow the gradient of -(R_u_neg - pi*R_p_neg)
    # to push the inner term back up (defensive step), or take no gradient at all
    defense_step: bool = True

    def __post_init__(self):
        if not 0.0 < self.pi < 1.0:
            raise ConfigurationError(f"class prior pi must be in (0, 1), got {self.pi}")


def combine_pu_risk(
    pi: float, r_p_pos: float, r_u_neg: float, r_p_neg: float, non_negative: bool
) -> float:
    """Scalar composition shared by upu_risk and nnpu_risk."""
    inner = r_u_neg - pi * r_p_neg
    if non_negative:
        inner = max(0.0, inner)
    return pi * r_p_pos + inner


def _surrogate_parts(model: ModelState, x_p: np.ndarray, x_u: np.ndarray):
    """Mean sigmoid-surrogate losses and the caches needed for gradients."""
    fp = mlp_forward(model, x_p)
    fu = mlp_forward(model, x_u)
    s_p = expit(-fp.logits)          # l(z, +1) per positive sample
    s_u = expit(fu.logits)           # l(z, -1) per unlabeled sample
    r_p_pos = float(s_p.mean())
    r_p_neg = float(1.0 - s_p.mean())   # l(z,-1) = 1 - l(z,+1) for sigmoid loss
    r_u_neg = float(s_u.mean())
    return r_p_pos, r_p_neg, r_u_neg, fp, fu, s_p, s_u


def _merge_grads(model, x_p, x_u, fp, fu, dz_p, dz_u) -> dict:
    gp = backprop_logits(model, x_p, fp.hidden, dz_p)
    gu = backprop_logits(model, x_u, fu.hidden, dz_u)
    return {k: gp[k] + gu[k] for k in gp}


def pn_risk(model: ModelState, x_p: np.ndarray, x_u: np.ndarray) -> tuple[float, dict]:
    """Mean unweighted BCE with labels 1 on x_p and 0 on x_u."""
    x = np.vstack([x_p, x_u]) if len(x_u) else np.asarray(x_p, dtype=np.float64)
    y = np.concatenate([np.ones(len(x_p)), np.zeros(len(x_u))])
    return numcore.weighted_bce_grad(model, x, y, np.ones(len(x)))


def upu_risk(
    model: ModelState, x_p: np.ndarray, x_u: np.ndarray, cfg: RiskConfig
) -> tuple[float, dict]:
    r_p_pos, r_p_neg, r_u_neg, fp, fu, s_p, s_u = _surrogate_parts(model, x_p, x_u)
    loss = combine_pu_risk(cfg.pi, r_p_pos, r_u_neg, r_p_neg, non_negative=False)
    # d/dz of pi*(l(z,+1) - l(z,-1)) = -2 pi s(1-s); d/dz of l(z,-1) = s(1-s)
    dz_p = -2.0 * cfg.pi * (s_p * (1.0 - s_p) / len(x_p))
    dz_u = s_u * (1.0 - s_u) / len(x_u)
    return loss, _merge_grads(model, x_p, x_u, fp, fu, dz_p, dz_u)


def nnpu_risk(
    model: ModelState, x_p: np.ndarray, x_u: np.ndarray, cfg: RiskConfig
) -> tuple[float, dict]:
    r_p_pos, r_p_neg, r_u_neg, fp, fu, s_p, s_u = _surrogate_parts(model, x_p, x_u)
    loss = combine_pu_risk(cfg.pi, r_p_pos, r_u_neg, r_p_neg, non_negative=True)
    inner = r_u_neg - cfg.pi * r_p_neg
    ds_p = s_p * (1.0 - s_p) / len(x_p)
    ds_u = s_u * (1.0 - s_u) / len(x_u)
    if inner >= 0.0:
        dz_p = -2.0 * cfg.pi * ds_p
        dz_u = ds_u
    elif cfg.defense_step:
        # descend on -(R_u_neg - pi*R_p_neg) alone to lift the clamped term
        # back up; d(inner)/dz_p = -pi*ds_p and d(inner)/dz_u = ds_u
        dz_p = cfg.pi * ds_p
        dz_u = -ds_u
    else:
        # plain clamp: the negative branch contributes no gradient, only the
        # pi*R_p_pos term keeps pulling
        dz_p = -cfg.pi * ds_p
        dz_u = np.zeros_like(ds_u)
    return loss, _merge_grads(model, x_p, x_u, fp, fu, dz_p, dz_u)


def pu_risk_inner(model: ModelState, x_p, x_u, cfg: RiskConfig) -> float:
    """The pre-clamp negative-class term R_u_neg - pi*R_p_neg (diagnostic)."""
    r_p_pos, r_p_neg, r_u_neg = _surrogate_parts(model, x_p, x_u)[:3]
    return r_u_neg - cfg.pi * r_p_neg


def _proportional_batches(rng, n_p, n_u, batch_size):
    """Shuffle both groups and split each into the same number of chunks."""
    n_batches = max(1, -(-(n_p + n_u) // batch_size))  # ceil division
    chunks_p = np.array_split(rng.permutation(n_p), n_batches)
    chunks_u = np.array_split(rng.permutation(n_u), n_batches)
    return list(zip(chunks_p, chunks_u))


def pretrain(
    model: ModelState,
    x_p: np.ndarray,
    x_u: np.ndarray,
    cfg: RiskConfig,
    epochs: int,
    batch_size: int,
    learning_rate: float,
    weight_decay: float = 0.0,
    seed: int = 0,
    mode: str = "nnpu",
    on_epoch: Callable[[int, ModelState], None] | None = None,
) -> ModelState:
    """Minibatch risk minimization with Adam; epochs=0 is the identity.

    Each minibatch draws proportionally from the positive and unlabeled pools
    so the estimator sees both groups at every step. mode selects the risk:
    "nnpu" (default pretraining), "upu", or "pn" (prior-free fallback).
    """
    if epochs < 0:
        raise ConfigurationError(f"epochs must be >= 0, got {epochs}")
    if mode not in ("nnpu", "upu", "pn"):
        raise ConfigurationError(f"unknown pretrain mode {mode!r}")
    for epoch in range(epochs):
        rng = np.random.default_rng([seed, PRETRAIN_STREAM, epoch])
        for idx_p, idx_u in _proportional_batches(rng, len(x_p), len(x_u), batch_size):
            if len(idx_p) == 0 or len(idx_u) == 0:
                continue  # tiny pools can leave one group empty in a chunk
            bp, bu = x_p[idx_p], x_u[idx_u]
            if mode == "nnpu":
                _, grads = nnpu_risk(model, bp, bu, cfg)
            elif mode == "upu":
                _, grads = upu_risk(model, bp, bu, cfg)
            else:
                _, grads = pn_risk(model, bp, bu)
            numcore.adam_step(model, grads, learning_rate, weight_decay)
        if on_epoch is not None and on_epoch(epoch, model):
            break  # callback asked to stop (e.g. validation patience ran out)
    return model
