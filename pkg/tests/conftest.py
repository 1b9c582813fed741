from __future__ import annotations

import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from grouptensor import config  # noqa: E402

_CRITERIA: dict[int, list[str]] = defaultdict(list)


@pytest.fixture(autouse=True)
def _default_config(monkeypatch):
    """Every test starts from the built-in caps, whatever the environment says."""
    monkeypatch.delenv(config.ENV_VAR, raising=False)
    config.set_config(config.Config())
    yield
    config.set_config(config.Config())


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[int(marker.args[0])].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        outcomes = _CRITERIA[number]
        ok = all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} ({len(outcomes)} checks)")
