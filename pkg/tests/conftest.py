import pytest

ACCEPTANCE = []


@pytest.fixture
def criterion():
    def record(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
