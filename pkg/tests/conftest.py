import pytest
from hypothesis import HealthCheck, settings

from persilat.heyting import heyting
from persilat.lattice import m3_lattice
from strategies import SHAPES

settings.register_profile(
    "persilat", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("persilat")

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def record(request):
    """Log one PASS/FAIL line for an acceptance criterion."""
    def _record(number: int, ok: bool, elapsed: float, bound: float, detail: str = ""):
        verdict = "PASS" if ok and elapsed < bound else "FAIL"
        line = f"criterion {number}: {verdict} ({elapsed:.2f}s, limit {bound:g}s){' ' + detail if detail else ''}"
        request.config.stash[ACCEPTANCE].append(line)
        print(line)
        return verdict == "PASS"
    return _record


@pytest.fixture(scope="session")
def algebras():
    return {name: heyting(l) for name, l in SHAPES.items()}


@pytest.fixture
def m3():
    return m3_lattice()
