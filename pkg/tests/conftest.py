"""Shared pytest plumbing for the test suite.

The acceptance tests append one pass/fail line per criterion to
``acceptance_lines``; the terminal-summary hook prints them after capture has
ended so they always appear in the run output, even for passing tests.
"""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
