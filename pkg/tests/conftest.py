import numpy as np
import pytest

_ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record_acceptance():
    """One PASS/FAIL line per criterion, echoed in the terminal summary."""
    def _record(criterion: int, ok: bool, detail: str) -> None:
        line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} — {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line, flush=True)
        assert ok, line
    return _record


@pytest.fixture(scope="session")
def gauss_hermite_nodes():
    """Shared quadrature rule for Gaussian-moment oracles."""
    x, w = np.polynomial.hermite.hermgauss(60)
    return x, w
