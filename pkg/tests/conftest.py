import _support


def pytest_terminal_summary(terminalreporter):
    if not _support.ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_support.ACCEPTANCE):
        title, passed, detail = _support.ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        line = f"ACCEPTANCE {number} [{status}] {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
