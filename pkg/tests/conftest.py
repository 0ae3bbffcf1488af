import pytest

_ACCEPTANCE: list[str] = []


class Recorder:
    """Collects per-check outcomes of one acceptance criterion."""

    def __init__(self, criterion: str):
        self.criterion = criterion
        self.checks: list[tuple[bool, str]] = []

    def check(self, ok, detail: str) -> bool:
        self.checks.append((bool(ok), detail))
        return bool(ok)

    def close(self) -> bool:
        ok = all(c for c, _ in self.checks)
        failed = [d for c, d in self.checks if not c]
        shown = failed if failed else [d for _, d in self.checks]
        line = f"{'PASS' if ok else 'FAIL'} {self.criterion}: " + "; ".join(shown)
        print(line)
        _ACCEPTANCE.append(line)
        return ok


@pytest.fixture
def criterion(request):
    """``criterion(name)`` returns a recorder; its line is printed at teardown."""
    made: list[Recorder] = []

    def factory(name: str) -> Recorder:
        rec = Recorder(name)
        made.append(rec)
        return rec

    yield factory
    for rec in made:
        if not any(rec.criterion in line for line in _ACCEPTANCE):
            rec.close()


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
