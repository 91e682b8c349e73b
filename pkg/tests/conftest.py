import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "SCORECARD", None)
    if not lines:
        return
    terminalreporter.section("acceptance scorecard")
    for line in lines:
        terminalreporter.write_line(line)
