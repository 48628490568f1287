"""Shared test utilities: finite differences and hand-sized models."""

import numpy as np

from robustpu.numcore import PARAM_NAMES, ModelState


def ident_model():
    """Model whose logit equals its scalar input: relu(x)-relu(-x) = x."""
    return ModelState(
        w1=np.array([[1.0, -1.0]]),
        b1=np.zeros(2),
        w2=np.array([1.0, -1.0]),
        b2=np.zeros(1),
    )


def finite_diff_grads(model, loss_fn, eps=1e-6):
    """Central finite differences of loss_fn(model) w.r.t. every parameter."""
    grads = {}
    for name in PARAM_NAMES:
        p = getattr(model, name)
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = p[idx]
            p[idx] = orig + eps
            hi = loss_fn(model)
            p[idx] = orig - eps
            lo = loss_fn(model)
            p[idx] = orig
            g[idx] = (hi - lo) / (2 * eps)
        grads[name] = g
    return grads


def grad_relative_error(analytic, numeric):
    num = 0.0
    den = 0.0
    for name in PARAM_NAMES:
        num += np.sum((analytic[name] - numeric[name]) ** 2)
        den += np.sum(numeric[name] ** 2)
    return np.sqrt(num) / max(np.sqrt(den), 1e-12)
