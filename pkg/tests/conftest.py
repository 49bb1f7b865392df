import sys


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if not verdicts:
        return
    from acceptance_checks import format_line
    terminalreporter.section("acceptance criteria")
    for verdict in verdicts:
        terminalreporter.write_line(format_line(verdict))
