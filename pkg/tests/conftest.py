import json
import os
import sys

import numpy as np
import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, HERE)

with open(os.path.join(HERE, "data", "baselines.json")) as fh:
    BASELINES = json.load(fh)

ORACLE = BASELINES["oracle"]
REGRESSION = BASELINES["regression"]


def carr(d):
    """Complex array from a stored {"re": ..., "im": ...} table."""
    return np.asarray(d["re"]) + 1j * np.asarray(d["im"])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, (status, detail) in mod.RESULTS.items():
        terminalreporter.write_line(f"criterion {cid:<9} {status}  {detail}")
