from __future__ import annotations

import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance verdict line and assert it.

    Lines are echoed in a terminal summary section so every criterion stays
    visible under pytest's output capture, pass or fail.
    """

    def _record(tag: str, ok: bool, detail: str) -> None:
        line = f"[{tag}] {'PASS' if ok else 'FAIL'} {detail}"
        print(line)
        _VERDICTS.append(line)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
