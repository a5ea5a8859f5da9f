import math

import numpy as np
import pytest


def sin_flow_exact(x0, c, t=1.0):
    """Closed-form flow of x' = c sin x: tan(x(t)/2) = e^{ct} tan(x0/2), and its Jacobian."""
    x1 = 2.0 * np.arctan(np.exp(c * t) * np.tan(np.asarray(x0) / 2.0))
    x1 = np.mod(x1, 2.0 * math.pi)
    jac = np.sin(x1) / np.sin(x0)  # dx1/dx0 = f(x1) / f(x0) for autonomous 1-D flows
    return x1, jac


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


CRITERIA = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line; returns ``passed`` so tests can assert on it."""
    lines = request.config.stash.setdefault(CRITERIA, [])

    def report(name, passed, detail):
        lines.append(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        return passed

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
