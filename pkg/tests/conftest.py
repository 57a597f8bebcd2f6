import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.TITLES):
        if k in mod.RESULTS:
            terminalreporter.write_line(mod.line_for(k))
        else:
            terminalreporter.write_line(f"FAIL criterion {k} ({mod.TITLES[k]}): not run")
