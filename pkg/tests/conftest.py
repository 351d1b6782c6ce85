import pytest

# label -> (title, passed, detail) in the order the acceptance tests ran
ACCEPTANCE = {}


def record(label, title, passed, detail=""):
    ACCEPTANCE[label] = (title, bool(passed), detail)
    print(f"criterion {label:>3} {'PASS' if passed else 'FAIL'} {title}: {detail}")


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, (title, ok, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"criterion {label:>3} {'PASS' if ok else 'FAIL'} {title}: {detail}")
