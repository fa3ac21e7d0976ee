import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(id, passed, detail)``."""

    def record(cid, passed, detail=""):
        _CRITERIA[cid] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=lambda c: (int("".join(ch for ch in c if ch.isdigit()) or 0), c)):
        ok, detail = _CRITERIA[cid]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {detail}")
