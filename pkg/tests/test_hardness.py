"""Hardness measurement tests against a fixed tiny model."""

import numpy as np
import pytest

from robustpu.errors import ConfigurationError
from robustpu.hardness import measure_hardness
from robustpu.numcore import ModelState

# Identity-ish model: one input, two hidden units computing relu(x), relu(-x),
# head w2=[1,-1] so the logit equals x exactly. Makes z trivially controllable.
IDENT = ModelState(
    w1=np.array([[1.0, -1.0]]),
    b1=np.zeros(2),
    w2=np.array([1.0, -1.0]),
    b2=np.zeros(1),
)


def col(*xs):
    return np.array(xs, dtype=np.float64).reshape(-1, 1)


def test_logistic_frozen_values():
    # oracle: scripts/derive_test_constants.py
    h = measure_hardness(IDENT, col(0.0, 2.0, -2.0), "positive", "logistic", tau=1.0)
    assert h.values[0] == pytest.approx(0.6931471805599453, abs=1e-12)   # ln 2
    assert h.values[1] == pytest.approx(0.1269280110429726, abs=1e-12)
    assert h.values[2] == pytest.approx(2.1269280110429727, abs=1e-12)


def test_sigmoid_frozen_values():
    h = measure_hardness(IDENT, col(2.0), "unlabeled", "sigmoid", tau=1.0)
    assert h.values[0] == pytest.approx(0.8807970779778823, abs=1e-12)
    h2 = measure_hardness(IDENT, col(1.0), "positive", "sigmoid", tau=0.5)
    assert h2.values[0] == pytest.approx(0.11920292202211755, abs=1e-12)


def test_pseudo_label_flips_between_groups():
    x = col(1.3)
    hp = measure_hardness(IDENT, x, "positive", "logistic", tau=1.0).values[0]
    hu = measure_hardness(IDENT, x, "unlabeled", "logistic", tau=1.0).values[0]
    # the same confident-positive logit is easy for P and hard for U
    assert hp < np.log(2.0) < hu


def test_temperature_rescales_the_margin():
    x = col(3.0)
    h1 = measure_hardness(IDENT, x, "positive", "logistic", tau=1.0).values[0]
    h3 = measure_hardness(IDENT, x, "positive", "logistic", tau=3.0).values[0]
    assert h3 == pytest.approx(np.log1p(np.exp(-1.0)), abs=1e-12)
    assert h3 > h1  # same logit looks less certain at higher temperature


def test_monotone_in_logit():
    xs = col(*np.linspace(-4, 4, 33))
    for metric in ("logistic", "sigmoid"):
        hp = measure_hardness(IDENT, xs, "positive", metric).values
        hu = measure_hardness(IDENT, xs, "unlabeled", metric).values
        assert (np.diff(hp) < 0).all()   # positives get easier as z grows
        assert (np.diff(hu) > 0).all()


def test_extreme_logits_stay_finite():
    xs = col(-1e4, -30.0, 30.0, 1e4)
    for group in ("positive", "unlabeled"):
        h = measure_hardness(IDENT, xs, group, "logistic", tau=1.0)
        assert np.isfinite(h.values).all()
        assert (h.values >= 0.0).all()
    # far-margin logistic hardness approaches |z|/tau itself
    h = measure_hardness(IDENT, col(-1e4), "positive", "logistic", tau=2.0)
    assert h.values[0] == pytest.approx(5e3, rel=1e-9)
    # sigmoid metric saturates inside (0, 1)
    h = measure_hardness(IDENT, xs, "positive", "sigmoid")
    assert (h.values >= 0.0).all() and (h.values <= 1.0).all()


def test_sigmoid_bounded_and_ranks_like_logistic():
    rng = np.random.default_rng(31)
    xs = col(*rng.normal(0.0, 5.0, size=64))
    a = measure_hardness(IDENT, xs, "unlabeled", "logistic", tau=0.7).values
    b = measure_hardness(IDENT, xs, "unlabeled", "sigmoid", tau=0.7).values
    assert (np.argsort(a) == np.argsort(b)).all()


def test_full_pass_no_minibatch_dependence():
    rng = np.random.default_rng(32)
    xs = col(*rng.normal(size=50))
    whole = measure_hardness(IDENT, xs, "positive").values
    parts = np.concatenate([
        measure_hardness(IDENT, xs[:17], "positive").values,
        measure_hardness(IDENT, xs[17:], "positive").values,
    ])
    assert np.array_equal(whole, parts)


def test_validation_errors():
    with pytest.raises(ConfigurationError):
        measure_hardness(IDENT, col(0.0), "negative")
    with pytest.raises(ConfigurationError):
        measure_hardness(IDENT, col(0.0), "positive", metric="hinge")
    with pytest.raises(ConfigurationError):
        measure_hardness(IDENT, col(0.0), "positive", tau=0.0)
