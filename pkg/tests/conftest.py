import random

import pytest
from hypothesis import HealthCheck, settings

from topoheight.builders import genus_surface, sphere_oct, torus_flat

settings.register_profile(
    "default", deadline=None, max_examples=30, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")


SURFACES = {
    "sphere_oct": sphere_oct,
    "torus_flat(3)": lambda: torus_flat(3),
    "torus_flat(4)": lambda: torus_flat(4),
    "genus_surface(2)": lambda: genus_surface(2),
}


@pytest.fixture(scope="session")
def surfaces():
    return {name: build() for name, build in SURFACES.items()}


@pytest.fixture
def rng():
    return random.Random(20261015)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
