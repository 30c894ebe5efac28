from __future__ import annotations

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return

    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines(module.RESULTS):
        terminalreporter.write_line(line)
