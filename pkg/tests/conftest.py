import numpy as np
import pytest

from liegeom.models import euclidean_manifold, nonlinear_manifold

# criterion number -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {n:>2}. {title}  [{detail}]")


@pytest.fixture(scope="session")
def plane():
    return euclidean_manifold(2)


@pytest.fixture(scope="session")
def line():
    return euclidean_manifold(1)


@pytest.fixture(scope="session")
def two_chart_line():
    return nonlinear_manifold()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
