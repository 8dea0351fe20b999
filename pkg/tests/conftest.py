import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dagedf.taskmodel import TaskSystem, make_task  # noqa: E402


@pytest.fixture
def uvw():
    """u(1) -> v(2) plus an independent w(3); D=4, T=3."""
    return make_task("t1", {"u": 1, "v": 2, "w": 3}, [("u", "v")], deadline=4, period=3)


@pytest.fixture
def uvw_system(uvw):
    return TaskSystem((uvw,))


@pytest.fixture
def diamond():
    return make_task("d", {"a": 1, "b": 2, "c": 5, "d": 1},
                     [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")], deadline=10, period=10)


@pytest.fixture
def unit():
    return make_task("unit", {"x": 1}, deadline=1, period=1)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import ROWS
    if not ROWS:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, passed, detail in sorted(ROWS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {num}. {title}: {detail}")
