import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from fxyz.elliptic import EllipticParams  # noqa: E402


@pytest.fixture
def params():
    return EllipticParams(2.0, 1, 6)


@pytest.fixture
def params8():
    return EllipticParams(2.0, 1, 8)


ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """Store (passed, detail) for an acceptance criterion; printed in the terminal summary."""

    def _record(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        ACCEPTANCE[number] = line
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
