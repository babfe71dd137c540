import sys

import numpy as np
import pytest

from betaprod import make_spec


def random_generic_spec(rng, m, u_range=(0.2, 3.0), gap_range=(0.3, 2.5), margin=0.1):
    """Random spec whose u-differences stay ``margin`` away from integers."""
    while True:
        u = rng.uniform(*u_range, size=m)
        diffs = [u[i] - u[j] for i in range(m) for j in range(i + 1, m)]
        if all(abs(d - round(d)) >= margin for d in diffs):
            break
    v = u + rng.uniform(*gap_range, size=m)
    return make_spec(zip(u, v))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
