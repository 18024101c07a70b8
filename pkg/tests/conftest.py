import pytest

_CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def criterion():
    """Record a criterion verdict; printed in the terminal summary."""
    def record(number: int, passed, detail: str = ""):
        status = passed if isinstance(passed, str) else ("PASS" if passed else "FAIL")
        _CRITERIA[number] = (status, detail)
        print(f"criterion {number:2d}: {status} {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status:4s} {detail}")
