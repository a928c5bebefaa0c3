from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from toricdescent.cone_monoid import cone, monoid_from_cone  # noqa: E402
from toricdescent.lambda_ring import build_instance  # noqa: E402

DATA = Path(__file__).resolve().parent.parent / "data"


def rank2_instance(t=(4, 2), s=2, i=1):
    N = monoid_from_cone(cone([(0, 1), (2, 1)]))
    M = monoid_from_cone(cone([(0, 1), (1, 1)]))
    return build_instance(N, M, cone([(1, 4), (1, 2)]), cone([(1, 8), (3, 4)]), (2, 1), t, i, s)


@pytest.fixture(scope="session")
def documented():
    """The documented rank-2 instance: t = (4,2), i = 1, s = 2."""
    return rank2_instance()


@pytest.fixture(scope="session")
def variant_t21():
    """Same cones with t = (2,1): has a degree-1 monomial, so s = 2 slices are nonzero."""
    return rank2_instance(t=(2, 1))


@pytest.fixture(scope="session")
def variant_s3():
    """Documented cones and t with s = 3."""
    return rank2_instance(s=3)


@pytest.fixture
def data_dir():
    return DATA


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
