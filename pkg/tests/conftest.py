import pytest

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture
def criterion():
    def record(number, checks):
        failed = [name for name, ok in checks if not ok]
        ACCEPTANCE[number] = (not failed, ", ".join(failed) if failed else f"{len(checks)} checks")
        assert not failed, f"criterion {number} failed: {failed}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} ({detail})")
