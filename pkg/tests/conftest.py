import pytest

_CRITERIA = {}


class CriterionLog:
    """Outcome of one acceptance criterion; ``ok`` stays False unless the test sets it."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.details = []
        self.ok = False

    def note(self, text):
        self.details.append(text)


@pytest.fixture
def criterion():
    def make(number, title):
        log = CriterionLog(number, title)
        _CRITERIA[number] = log
        return log

    return make


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        log = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if log.ok else 'FAIL'} - {log.title}")
        for d in log.details:
            terminalreporter.write_line(f"    {d}")
