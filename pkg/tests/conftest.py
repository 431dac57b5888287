def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
