import os

os.environ.setdefault("STRUCTMAT_DEBUG", "1")

import pytest  # noqa: E402

from structmat import debug  # noqa: E402

# acceptance outcomes, filled in by test_acceptance and printed at the end
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def debug_on():
    old = debug.enabled()
    debug.set_debug(True)
    yield
    debug.set_debug(old)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")
