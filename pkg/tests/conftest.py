import itertools

import numpy as np
import pytest

from qem.processes import alternating_switches, iid_coin, perturbed_coin, random_machine


@pytest.fixture
def coin():
    return perturbed_coin(0.25)


@pytest.fixture
def alternating():
    return alternating_switches()


@pytest.fixture
def fair_coin():
    return iid_coin(0.5)


def brute_force_conditional_entropy(machine, p, t):
    """H(S_-1 | X_0^t) by walking every length-t word from every start state."""
    T = machine.transitions
    total = 0.0
    for word in itertools.product(range(machine.n_symbols), repeat=t):
        joint = np.zeros(machine.n_states)
        for s in range(machine.n_states):
            prob, cur = p[s], s
            for r in word:
                k = int(np.argmax(T[cur, :, r]))
                prob *= T[cur, k, r]
                cur = k
                if prob == 0:
                    break
            joint[s] = prob
        pw = joint.sum()
        if pw > 0:
            q = joint[joint > 0] / pw
            total += pw * float(-(q * np.log2(q)).sum())
    return total


def nullspace_stationary(machine):
    """Stationary vector from a dense linear solve (independent of power iteration)."""
    M = machine.marginal_matrix
    n = M.shape[0]
    A = np.vstack([M.T - np.eye(n), np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    return np.linalg.lstsq(A, b, rcond=None)[0]


def random_machines(count, seed, max_states=5, max_symbols=3):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(1, max_states + 1))
        m = int(rng.integers(2, max_symbols + 1))
        try:
            out.append(random_machine(n, m, rng, max_tries=1000))
        except RuntimeError:
            pass
    return out
