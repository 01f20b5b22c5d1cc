"""Shared random parameter generators for the test suite."""
import numpy as np
import pytest

from orthocentric.gram import ConeParams


def random_params(rng, d, case="A"):
    """A random valid parameter tuple.

    ``case`` is ``"A"`` (all positive), ``"B0"`` (negative ``lambda0``) or
    ``"Bk"`` (one negative ``lambda_k``).
    """
    lam = rng.uniform(0.2, 5.0, size=d)
    eps = rng.choice([-1, 1], size=d)
    if case == "A":
        lam0 = rng.uniform(0.2, 5.0)
    elif case == "B0":
        lam0 = -lam.sum() - rng.uniform(0.1, 5.0)
    elif case == "Bk":
        lam0 = rng.uniform(0.2, 5.0)
        k = rng.integers(d)
        lam[k] = 0.0
        lam[k] = -(lam0 + lam.sum()) - rng.uniform(0.1, 5.0)
    else:
        raise ValueError(case)
    return ConeParams(lam0, lam, eps)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
