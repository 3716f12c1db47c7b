import pytest

CLAUSES = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[CLAUSES] = {}


@pytest.fixture
def report(request):
    """Record one clause result for an acceptance criterion."""
    table = request.config.stash[CLAUSES]

    def _report(criterion: int, clause: str, ok: bool):
        table.setdefault(criterion, []).append((clause, bool(ok)))
        return ok

    return _report


def pytest_terminal_summary(terminalreporter, config):
    table = config.stash[CLAUSES]
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(table):
        clauses = table[crit]
        failed = [c for c, ok in clauses if not ok]
        if failed:
            terminalreporter.write_line(f"FAIL criterion {crit}: red clauses: {'; '.join(failed)}")
        else:
            terminalreporter.write_line(f"PASS criterion {crit}: {'; '.join(c for c, _ in clauses)}")
