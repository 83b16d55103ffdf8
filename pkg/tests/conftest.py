import numpy as np
import pytest

from invdet.distributions import standard_complex_normal
from invdet.scenario import Scenario


def random_pd(rng, n, floor=1.0):
    A = standard_complex_normal(rng, (n, n))
    return A @ A.conj().T + floor * np.eye(n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def fig1_scenario():
    return Scenario.from_settings(N=8, K=12, r=2, t=4)


@pytest.fixture(scope="session")
def full_scenario():
    return Scenario.from_settings(N=6, K=12, r=2, t=4)


# acceptance criterion -> list of (label, passed, detail)
ACCEPTANCE = {}


def record(criterion, label, passed, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((label, bool(passed), detail))
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[crit]
        ok = all(p for _, p, _ in parts)
        detail = "; ".join(f"{label}: {'pass' if p else 'FAIL'} ({d})" if d else f"{label}: {'pass' if p else 'FAIL'}"
                           for label, p, d in parts)
        terminalreporter.write_line(f"criterion {crit:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
