import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qtlr.quaternion import QTensor

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# acceptance criteria outcomes, printed at the end of the session
ACCEPTANCE = {}


def rand_q(shape, seed=0, scale=1.0) -> QTensor:
    rng = np.random.default_rng(seed)
    return QTensor(scale * rng.standard_normal((4,) + tuple(shape)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
