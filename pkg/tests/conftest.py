import random

import pytest

ACCEPTANCE: dict[int, list] = {}


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def criterion(request):
    """Records one pass/fail line per acceptance criterion."""
    notes: list[str] = []
    yield notes
    n = request.node.get_closest_marker("criterion").args[0]
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    ACCEPTANCE.setdefault(n, []).append((ok, notes))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    out = yield
    rep = out.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            runs = ACCEPTANCE[n]
            ok = all(r[0] for r in runs)
            notes = [x for r in runs for x in r[1]]
            line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}"
            terminalreporter.write_line(line + (f"  ({'; '.join(notes)})" if notes else ""))
