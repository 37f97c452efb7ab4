"""Collects acceptance outcomes and prints one line per criterion at the end of the run."""
import pytest

_OUTCOMES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def measured(request):
    """Lets an acceptance test attach the numbers it measured to its summary line."""
    notes = []
    request.node.measured_notes = notes
    return notes.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    notes = "; ".join(getattr(item, "measured_notes", []))
    _OUTCOMES.setdefault(number, []).append((title, rep.passed, notes))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        parts = _OUTCOMES[number]
        ok = all(p for _, p, _ in parts)
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}")
        for title, passed, notes in parts:
            line = f"      {'pass' if passed else 'FAIL'}  {title}"
            tr.write_line(line + (f"  [{notes}]" if notes else ""))
