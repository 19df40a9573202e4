import sys

import pytest

from stal.syntax import parse_instance

EVENTUALITY_TBOX = """
primitive A;
role R;
B := (or A (some R B));
Bd := (and (not A) (all R Bd));
"""

FEATURE_TBOX = """
primitive A;
feature f;
B := (or A (some f B));
Bp := (and (not A) (all f Bp));
"""

SPATIAL_SIG = """
primitive A;
role R;
feature f;
cfeature g, h;
"""


@pytest.fixture
def ev_tbox():
    return parse_instance(EVENTUALITY_TBOX).tbox


@pytest.fixture
def feature_tbox():
    return parse_instance(FEATURE_TBOX).tbox


@pytest.fixture
def spatial_sig():
    return parse_instance(SPATIAL_SIG).tbox.signature


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
