import pytest

from streamsub.oracles import CutOracle

A, B, C = 0, 1, 2


@pytest.fixture
def p3():
    """Undirected path a - b - c with unit weights."""
    return CutOracle(3, [(A, B, 1.0), (B, C, 1.0)])


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
