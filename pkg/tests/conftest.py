import numpy as np
import pytest

# 512-node Gauss-Legendre tensor oracle of the example integral at
# (A, B, C, D) = (1, 0.5, -0.8, 0.2), computed with numpy.polynomial.legendre.leggauss
# before the package existed.
REFERENCE_VALUE = 62.18051570931453


def leggauss_integral(f, lo, hi, n=512):
    """Independent 1D oracle: numpy's Gauss-Legendre nodes, not ours."""
    t, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return half * np.sum(w * f(0.5 * (hi + lo) + half * t))


@pytest.fixture
def oracle_1d():
    return leggauss_integral


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
        if detail:
            line += f" -- {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
