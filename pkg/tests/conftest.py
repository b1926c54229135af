from pathlib import Path

import pytest

from meshkit.textio import parse_covering, parse_quiver

FIXTURES = Path(__file__).parent / "fixtures"

# criterion number -> (passed, detail); filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def load(name: str):
    return parse_quiver((FIXTURES / name).read_text())


def load_cover(name: str):
    return parse_covering((FIXTURES / name).read_text())


@pytest.fixture
def za2():
    return load("za2.q")


@pytest.fixture
def za3():
    return load("za3.q")


@pytest.fixture
def tri3():
    return load("triangle_a3.q")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
