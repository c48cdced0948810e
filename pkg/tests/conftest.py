from __future__ import annotations

import os

import pytest

# enumeration runs single-process unless a test opts in
os.environ.setdefault("WALKGEN_THREADS", "1")

_CRITERIA: dict[int, tuple[bool, str, float]] = {}


class CriterionLog:
    """Records one outcome per acceptance criterion for the summary."""

    def record(self, number: int, ok: bool, detail: str, seconds: float) -> None:
        _CRITERIA[number] = (ok, detail, seconds)


@pytest.fixture(scope="session")
def criterion_log():
    return CriterionLog()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok, detail, secs = _CRITERIA[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail} ({secs:.1f} s)")
