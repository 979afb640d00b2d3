"""Shared fixtures and generators for the test suite."""

import numpy as np
import pytest

from fhat.belief import new_trajectory, step_trajectory
from fhat.model import make_model, table1, table2


@pytest.fixture(scope="session")
def t1():
    return table1()


@pytest.fixture(scope="session")
def t2():
    return table2()


def random_model(rng, max_hyp=5, max_exp=5, max_obs=4, floor=0.25,
                 allow_dropped_symbols=True):
    """A valid random model: full-rank kernels with probabilities bounded
    away from zero (keeps LLRs modest), optionally with a shared dropped
    observation symbol per experiment to exercise support handling."""
    M = int(rng.integers(2, max_hyp + 1))
    U = int(rng.integers(1, max_exp + 1))
    Y = int(rng.integers(2, max_obs + 1))
    kernel = np.zeros((M, U, Y))
    for u in range(U):
        drop = None
        if allow_dropped_symbols and Y >= 3 and rng.random() < 0.3:
            drop = int(rng.integers(Y))
        for i in range(M):
            w = rng.uniform(floor, 1.0, Y)
            if drop is not None:
                w[drop] = 0.0
            kernel[i, u] = w / w.sum()
    prior = rng.uniform(0.2, 1.0, M)
    prior = prior / prior.sum()
    return make_model([f"h{i}" for i in range(M)],
                      [f"u{u}" for u in range(U)],
                      [f"y{y}" for y in range(Y)],
                      kernel, prior)


def sample_observation(model, rng, truth, u):
    cum = np.cumsum(model.kernel[truth, u])
    return int(min(int((cum <= rng.random()).sum()), model.num_observations - 1))


def random_trajectory(model, rng, max_steps=50, reference=None, beta_star=None):
    """Step a trajectory with uniformly random experiments and
    observations drawn from a random true hypothesis."""
    M = model.num_hypotheses
    i = int(rng.integers(M)) if reference is None else reference
    truth = int(rng.integers(M))
    t = new_trajectory(model, i, beta_star=beta_star)
    for _ in range(int(rng.integers(0, max_steps + 1))):
        u = int(rng.integers(model.num_experiments))
        t = step_trajectory(t, u, sample_observation(model, rng, truth, u))
    return t
