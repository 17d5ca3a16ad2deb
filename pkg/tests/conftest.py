from fractions import Fraction

import pytest

from owatree.model import classify_weights, example_instance

F = Fraction

# edge ids of the 4-vertex example: 0=[1,2] 1=[1,3] 2=[1,4] 3=[2,3] 4=[2,4] 5=[3,4]
T1, T2, T3, T4 = (2, 3, 5), (0, 1, 2), (1, 3, 5), (0, 2, 3)


@pytest.fixture
def ex():
    return example_instance()


@pytest.fixture
def w_ex():
    return classify_weights(["0.5", "0.3", "0.2"])


_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    rep = outcome.get_result()
    num, title = marker.args
    entry = _criteria.setdefault(num, {"title": title, "ok": True, "time": 0.0})
    entry["time"] += rep.duration
    if rep.failed:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        c = _criteria[num]
        status = "PASS" if c["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d} {status}  {c['title']}  ({c['time']:.2f}s)")
