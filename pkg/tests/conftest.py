from fractions import Fraction

import pytest

from stretchseries.generators import dyck_height_series, fragmented_permutations, ipdsaw_series
from stretchseries.seriescore import ExactSeries, PrecisionConfig

_LINES = []


class Recorder:
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def __call__(self, label, value, target, ok):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: got {value}; want {target}"
        _LINES.append(line)
        print(line)
        return ok


@pytest.fixture
def record():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _LINES:
        terminalreporter.write_line(line)
    passed = sum(1 for x in _LINES if x.startswith("[PASS]"))
    terminalreporter.write_line(f"{passed}/{len(_LINES)} criteria met")


@pytest.fixture(scope="session")
def cfg():
    return PrecisionConfig(256)


@pytest.fixture(scope="session")
def fragmented50():
    return fragmented_permutations(50)


@pytest.fixture(scope="session")
def dyck_natural():
    """Dyck height series at y=1/2 as a series in n (semilength), through n = 101."""
    d = dyck_height_series(202, Fraction(1, 2))
    return ExactSeries(d.coeffs)


@pytest.fixture(scope="session")
def ipdsaw5():
    return ipdsaw_series(701, 5)
