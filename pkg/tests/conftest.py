import numpy as np
import pytest

from robdea.io import bundled

# Reference values, rounded to 4 decimals (2 for the robust BCC column).
HOSPITAL_IDS = list("ABCDEFGHIJKL")
HOSPITAL_CLASSICAL = [1, 1, 0.8827, 1, 0.7635, 0.8348, 0.9020, 0.7963, 0.9604, 0.8707, 0.9551, 0.9582]
HOSPITAL_LP = [1.1696, 1.0843, 0.9377, 1.0079, 0.8659, 0.9100, 0.9485, 0.8866, 0.9798, 0.9309, 0.9770, 0.9787]
HOSPITAL_EXACT = [1.1708, 1.0845, 0.9376, 1.0079, 0.8653, 0.9097, 0.9484, 0.8863, 0.9798, 0.9307, 0.9770, 0.9787]

INTERVAL_RANGES = {
    "A": (1.0169, 1.1148), "B": (0.5937, 0.7675), "C": (0.8437, 0.9566), "D": (0.6882, 0.8770),
    "E": (0.9819, 1.1292), "F": (0.7601, 0.8768), "G": (0.8852, 1.0643), "H": (0.8224, 0.9814),
    "I": (0.9028, 1.0482), "J": (1.0229, 1.1318),
}
ALWAYS_EFFICIENT = {"A", "J"}
NEVER_EFFICIENT = {"B", "C", "D", "F", "H"}

BCC_CLASSICAL = [1, 1, 1, 0.75, 1, 0.40, 0.50, 0.75]
BCC_ROBUST = [1.00, 1.05, 1.11, 0.86, 1.14, 0.57, 0.67, 0.86]


@pytest.fixture(scope="session")
def hospitals():
    return bundled("hospitals")


@pytest.fixture(scope="session")
def abc():
    return bundled("abc")


@pytest.fixture(scope="session")
def interval_data():
    return bundled("interval")


@pytest.fixture(scope="session")
def bcc_data():
    return bundled("bcc")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {key}: {detail}")
