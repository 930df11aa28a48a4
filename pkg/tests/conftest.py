import pytest

ACCEPTANCE_RESULTS = []


@pytest.fixture
def acceptance_record():
    """Record a labelled acceptance check and assert it in one step."""

    def record(label: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_RESULTS.append((label, bool(ok), detail))
        assert ok, f"criterion {label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if ok else "FAIL"
        line = f"criterion {label}: {status}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
