import math

import numpy as np
import pytest

from helixfield.model import PRESETS, HelixState

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(criterion: str, passed: bool, detail: str = "") -> None:
    _ACCEPTANCE.append((criterion, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE:
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {criterion}: {detail}")


@pytest.fixture
def fig3():
    return PRESETS["fig3"]


@pytest.fixture
def eq16():
    return PRESETS["eq16"]


def random_cases(n=100, seed=20240601):
    """Initial states with components in [-2, 2] and g in [0.01, 0.5]."""
    rng = np.random.default_rng(seed)
    p = rng.uniform(-2, 2, (n, 3))
    q = rng.uniform(-2, 2, (n, 3))
    g = rng.uniform(0.01, 0.5, n)
    return p, q, g


def periods(p, q, g):
    r = 2.0 * g * np.linalg.norm(p + q, axis=-1)
    return 2.0 * math.pi / r


def state(p, q):
    return HelixState.from_arrays(p, q)
