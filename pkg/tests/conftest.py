"""Shared fixtures: the standard sweep is expensive enough to build once."""

import math
import time
from types import SimpleNamespace

import numpy as np
import pytest

from gapless.verify import sweep_reports

STANDARD_L = math.pi / 3
STANDARD_MU = tuple(float(m) for m in np.logspace(2, 6, 9))


@pytest.fixture(scope="session")
def standard_sweep():
    """Reports for the standard sweep L = pi/3, mu = 1e2..1e6 (9 points)."""
    t0 = time.time()
    reports = sweep_reports(STANDARD_L, STANDARD_MU)
    elapsed = time.time() - t0
    return SimpleNamespace(
        L=STANDARD_L,
        mu_values=STANDARD_MU,
        reports=reports,
        elapsed=elapsed,
    )
