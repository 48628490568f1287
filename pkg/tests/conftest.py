import json

import numpy as np
import pandas as pd
import pytest

# one line per acceptance criterion, echoed after the test summary so the
# pass/fail verdicts survive pytest's output capture
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture()
def toy_data_dir(tmp_path):
    """A data directory holding one synthetic two-blob dataset named 'toy'."""
    rng = np.random.default_rng(12)
    n = 400
    labels = rng.integers(0, 2, size=n)
    df = pd.DataFrame(
        {
            "class": labels,
            "x0": rng.normal(size=n) + 1.8 * labels,
            "x1": rng.normal(size=n) - 1.8 * labels,
        }
    )
    df.to_csv(tmp_path / "toy.csv", index=False)
    (tmp_path / "toy.schema.json").write_text(
        json.dumps(
            {
                "label_column": "class",
                "positive_classes": [1],
                "negative_classes": [0],
                "feature_scaling": "zscore",
                "name": "toy",
            }
        )
    )
    return tmp_path
