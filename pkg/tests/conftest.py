import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def _report(name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip()
        lines.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def calibrated():
    """Calibrated coefficients for m = 1..6 over the default wavelengths, with timing."""
    import time

    from shapelet_scope.calibration import calibrate_scale
    from shapelet_scope.shapelets import ShapeletIndex

    t0 = time.perf_counter()
    coeffs = {m: calibrate_scale(ShapeletIndex(0, m)) for m in range(1, 7)}
    return coeffs, time.perf_counter() - t0
