import pytest
from hypothesis import HealthCheck, settings

from tucongestion.frontends import GraphSpec, vertex_cover_game
from tucongestion.model import DelayTable, GameInstance, TUSystem

settings.register_profile("repo", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture
def edge_vc() -> GameInstance:
    """Two players each covering the single edge uv; d = (1, 3) on both nodes."""
    return vertex_cover_game(GraphSpec(("u", "v"), (("u", "v"),)), [None, None],
                             DelayTable.uniform(2, [1, 3]))


@pytest.fixture
def edge_vc_system() -> TUSystem:
    return TUSystem.build([[1, 1]], [1], [None], 2)


_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    number, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    _CRITERIA[number] = (title, report.passed, detail, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, detail, seconds = _CRITERIA[number]
        verdict = "PASS" if passed else "FAIL"
        line = f"criterion {number} [{title}]: {verdict} in {seconds:.1f}s"
        terminalreporter.write_line(f"{line}; {detail}" if detail else line)
