import pytest
from hypothesis import settings

from neurosieve.qs import SieveInterval, build_factor_base

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def fb91():
    """n = 91, B = 5, x in [-5, 4]."""
    return build_factor_base(91, 5, SieveInterval.centered(10))


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" not in rep.nodeid or rep.when != "call":
                continue
            props = dict(rep.user_properties)
            lines.append((props.get("criterion", 0), outcome, rep.nodeid.split("::")[-1], props.get("detail", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for num, outcome, name, detail in sorted(lines):
        terminalreporter.write_line(f"[{'PASS' if outcome == 'passed' else 'FAIL'}] {num}. {name}: {detail}")
