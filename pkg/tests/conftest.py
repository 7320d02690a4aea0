import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nearmiss.sequence import Dataset, make_sequence  # noqa: E402


@pytest.fixture
def fig1_pain():
    """The pain sequence sketched in the overview figure: AU7 starts with AU6, AU4 overlaps AU43."""
    return make_sequence(
        "s1",
        "pain",
        [
            ("e1", 7, 0, 10, "c"),
            ("e2", 6, 0, 20, "b"),
            ("e3", 4, 5, 30, "c"),
            ("e4", 43, 10, 40, None),
        ],
    )


@pytest.fixture
def small_dataset(fig1_pain):
    disgust = make_sequence(
        "s2", "disgust", [("e1", 9, 0, 15, "b"), ("e2", 4, 3, 12, "c"), ("e3", 10, 20, 30, "a")]
    )
    disgust2 = make_sequence("s3", "disgust", [("e1", 9, 5, 25, "c"), ("e2", 43, 30, 40, "d")])
    pain2 = make_sequence(
        "s4", "pain", [("e1", 4, 0, 20, "d"), ("e2", 43, 10, 30, "c"), ("e3", 7, 0, 5, "c")]
    )
    return Dataset(("pain", "disgust"), (fig1_pain, disgust, disgust2, pain2))


_acceptance = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    # a setup failure never reaches the call phase, so record it here
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
