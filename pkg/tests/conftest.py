import sys
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from degmap.io import parse_cycle_csv
from degmap.reference import data_dir

settings.register_profile(
    "degmap", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "degmap"))

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def wang_rows():
    return parse_cycle_csv((data_dir() / "wang.csv").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
