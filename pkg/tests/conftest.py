"""Collects acceptance verdicts and prints them after the run."""

ACCEPTANCE = {}


def record(number: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"ACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"{number:2d} {'PASS' if ok else 'FAIL'}  {detail}")
