import math
import sys

import pytest

from trapion.iondb import load_ion_db
from trapion.ramancoupling import BERYLLIUM_9


@pytest.fixture(scope="session")
def ions():
    return load_ion_db()


@pytest.fixture(scope="session")
def be9():
    return BERYLLIUM_9


@pytest.fixture(scope="session")
def ion_by_name(ions):
    return {ion.name: ion for ion in ions}


TWO_PI = 2 * math.pi


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
