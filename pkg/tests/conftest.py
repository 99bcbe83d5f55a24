import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{name:>4} {'PASS' if ok else 'FAIL'}  {detail}")
