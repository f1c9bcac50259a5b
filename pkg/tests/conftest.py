from hypothesis import settings

settings.register_profile("cubeslice", max_examples=60, deadline=None)
settings.load_profile("cubeslice")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
