import itertools
import random

import pytest

from kinterchange import Permutation, table1_objective
from kinterchange.objectives import random_table_objective

# Published numerical example, row order as printed.
TABLE1 = {
    "3124": 1, "3142": 2, "3214": 1, "3241": 2, "3412": 2, "3421": 2,
    "4123": 2, "4132": 2, "4213": 2, "4231": 3, "4312": 2, "4321": 3,
    "1234": 0, "1243": 1, "1324": 1, "1342": 1, "1423": 1, "1432": 1,
    "2134": 1, "2143": 2, "2314": 1, "2341": 2, "2413": 2, "2431": 2,
}


def P(text):
    return Permutation(tuple(int(c) for c in text))


def oracle_is_neighbor(s, x, k):
    """x in V^k(s) iff x != s and all differing positions fit in one window of length k."""
    diff = [i for i in range(len(s)) if s[i] != x[i]]
    return bool(diff) and diff[-1] - diff[0] + 1 <= k


def oracle_neighbors(s, k):
    n = len(s)
    return {x for x in itertools.permutations(range(1, n + 1)) if oracle_is_neighbor(tuple(s), x, k)}


@pytest.fixture(scope="session")
def table1():
    return table1_objective()


@pytest.fixture(scope="session")
def random_tables_n5():
    return [random_table_objective(5, random.Random(1000 + i), name=f"rand5-{i}") for i in range(20)]


ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ACCEPTANCE[name] == 'passed' else 'FAIL'}  {name}")
