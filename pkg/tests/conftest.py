import numpy as np
import pytest
from hypothesis import settings

from glc.domains import single_integrator
from glc.environment import Ball, Box, Complement, Everywhere
from glc.planner import Problem

# fixed example sequence so repeated runs see the same cases
settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")


@pytest.fixture
def integrator():
    return single_integrator()


@pytest.fixture
def open_plane(integrator):
    """Obstacle-free single integrator heading for a ball at (2, 0)."""
    return Problem(integrator, np.zeros(2), Everywhere(), Ball((2.0, 0.0), 0.5))


@pytest.fixture
def blocked_plane(integrator):
    """One box obstacle just right of the start, goal up and to the right."""
    free = Complement(Box((0.4, -0.4), (0.8, 0.4)))
    return Problem(integrator, np.zeros(2), free, Ball((1.0, 1.0), 0.4))


# -- acceptance verdicts ----------------------------------------------------------------

_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record a one-line PASS/FAIL for an acceptance criterion and assert it."""
    lines = request.config.stash.setdefault(_VERDICTS, [])

    def record(label: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
