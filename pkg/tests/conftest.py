from fractions import Fraction

import pytest

from robusthedge.models import binomial_instance, g3_tree, gap3_instance

F = Fraction


@pytest.fixture
def g3():
    return g3_tree()


@pytest.fixture
def gap3():
    return gap3_instance()


@pytest.fixture
def binomial():
    return binomial_instance()


# G3 leaf ids by price
LOW, MID, HIGH = 1, 2, 3


ACCEPTANCE_LOG: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LOG:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
