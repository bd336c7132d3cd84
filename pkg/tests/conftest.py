import numpy as np
import pytest

from relbelief.model import DiscreteModel, Marginalization


def random_model(rng, max_theta=8, max_x=8, min_theta=2, min_x=2, zeros=False):
    """A random finite model; with ``zeros`` some likelihood entries are exactly 0."""
    k = int(rng.integers(min_theta, max_theta + 1))
    n = int(rng.integers(min_x, max_x + 1))
    prior = rng.dirichlet(np.ones(k))
    lik = rng.dirichlet(np.ones(n), size=k)
    if zeros:
        lik = np.where(rng.random(lik.shape) < 0.2, 0.0, lik)
        lik[np.arange(k), rng.integers(0, n, size=k)] += 0.1
        lik /= lik.sum(axis=1, keepdims=True)
    prior = prior / prior.sum()
    return DiscreteModel([f"t{i}" for i in range(k)], prior, [f"x{j}" for j in range(n)], lik)


def random_marginalization(rng, model):
    k = model.n_theta
    n_psi = int(rng.integers(1, k + 1))
    codes = np.concatenate([np.arange(n_psi), rng.integers(0, n_psi, size=k - n_psi)])
    rng.shuffle(codes)
    return Marginalization([f"p{c}" for c in codes])


@pytest.fixture
def m1():
    return DiscreteModel(["θ1", "θ2"], [0.5, 0.5], ["x1", "x2"], [[0.8, 0.2], [0.2, 0.8]])


@pytest.fixture
def m2():
    model = DiscreteModel(
        ["a", "b", "c"], [0.25, 0.25, 0.5], ["x", "y"], [[0.6, 0.4], [0.2, 0.8], [0.9, 0.1]]
    )
    return model, Marginalization(["psi0", "psi0", "psi1"])


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def verdict(request):
    """Record one pass/fail line for an acceptance criterion, then assert it."""
    lines = request.config._acceptance_lines

    def record(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
