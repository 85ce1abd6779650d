from fractions import Fraction

import pytest

from pickseq.core import Instance


@pytest.fixture
def four_goods():
    # two agents with the same order but different intensities
    return Instance([[8, 7, 5, 0], [7, 6, 4, 3]])


@pytest.fixture
def irregular_instance():
    return Instance([[6, 0, 0, 0, 0], [2, 1, 1, 1, 1], [6, 0, 0, 0, 0]])


def F(x):
    return Fraction(x)


ACCEPTANCE = []


def report(number, ok, text):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {text}"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
