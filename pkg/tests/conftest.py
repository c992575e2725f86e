import pytest

import pyss
from pyss import api
from pyss import runtime as rt_mod


@pytest.fixture(autouse=True)
def clean_runtime():
    yield
    rt = rt_mod.active_runtime()
    if rt is not None and rt.phase is pyss.Phase.RUNNING:
        rt_mod.finish()
    if not api.STATIC_SERIAL:
        api.set_execution_mode(False)
    rt_mod.logger.setLevel(pyss.LogLevel.WARNING)


# acceptance criteria report ---------------------------------------------

ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with (passed, detail)."""
    name = request.node.name

    def record(passed: bool, detail: str = ""):
        ACCEPTANCE.append((name, bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
