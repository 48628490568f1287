"""Weight mapping tests: frozen values, bounds, monotonicity in d and lambda."""

import numpy as np
import pytest

from robustpu.errors import ConfigurationError
from robustpu.hardness import HardnessVector
from robustpu.weighting import MAPPINGS, map_weights


def hv(values):
    return HardnessVector(group="unlabeled", values=np.asarray(values, dtype=np.float64),
                          metric="logistic", tau=1.0)


def test_welsch_frozen_values():
    # oracle: scripts/derive_test_constants.py
    w = map_weights(hv([0.0, 0.5, 0.02]), lam=1.0, mapping="welsch")
    assert w.values[0] == pytest.approx(1.0, abs=1e-15)
    assert w.values[1] == pytest.approx(0.6065306597126334, abs=1e-12)
    w2 = map_weights(hv([0.02]), lam=0.1, mapping="welsch")
    assert w2.values[0] == pytest.approx(0.1353352832366127, abs=1e-12)


def test_welsch_at_lambda_squared_is_inverse_e():
    for lam in (0.1, 0.5, 1.0, 2.3):
        w = map_weights(hv([lam * lam]), lam=lam, mapping="welsch")
        assert w.values[0] == pytest.approx(0.36787944117144233, abs=1e-12)


def test_hard_threshold_is_strict():
    w = map_weights(hv([0.0, 0.49, 0.5, 0.51]), lam=0.5, mapping="hard")
    assert w.values.tolist() == [1.0, 1.0, 0.0, 0.0]


def test_linear_ramp_values():
    w = map_weights(hv([0.0, 0.25, 0.5, 0.75]), lam=0.5, mapping="linear")
    assert w.values.tolist() == pytest.approx([1.0, 0.5, 0.0, 0.0], abs=1e-15)


def test_weights_bounded_and_monotone_in_hardness():
    rng = np.random.default_rng(21)
    for _ in range(100):
        d = np.sort(rng.uniform(0.0, 6.0, size=40))
        lam = float(rng.uniform(0.05, 3.0))
        for mapping in MAPPINGS:
            v = map_weights(hv(d), lam, mapping).values
            assert v.min() >= 0.0 and v.max() <= 1.0
            assert (np.diff(v) <= 1e-12).all()  # harder never gets more weight


def test_weights_monotone_in_lambda():
    rng = np.random.default_rng(22)
    for _ in range(100):
        d = rng.uniform(0.0, 6.0, size=40)
        lam_lo = float(rng.uniform(0.05, 1.5))
        lam_hi = lam_lo + float(rng.uniform(0.01, 2.0))
        for mapping in MAPPINGS:
            lo = map_weights(hv(d), lam_lo, mapping).values
            hi = map_weights(hv(d), lam_hi, mapping).values
            assert (hi >= lo - 1e-12).all()  # relaxing the threshold only admits more


def test_zero_hardness_gets_full_weight():
    for mapping in MAPPINGS:
        v = map_weights(hv([0.0]), lam=0.7, mapping=mapping).values
        assert v[0] == pytest.approx(1.0, abs=1e-15)


def test_group_label_carried_through():
    w = map_weights(hv([0.1]), lam=1.0)
    assert w.group == "unlabeled" and w.mapping == "welsch" and w.lam == 1.0


def test_validation_errors():
    with pytest.raises(ConfigurationError):
        map_weights(hv([0.1]), lam=0.0)
    with pytest.raises(ConfigurationError):
        map_weights(hv([0.1]), lam=-1.0)
    with pytest.raises(ConfigurationError):
        map_weights(hv([0.1]), lam=1.0, mapping="cauchy")
