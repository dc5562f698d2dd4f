"""Collect the acceptance lines and print them at the end of the run."""

ACCEPTANCE_KEY = "_sharpconst_acceptance_lines"


def pytest_configure(config):
    setattr(config, ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
