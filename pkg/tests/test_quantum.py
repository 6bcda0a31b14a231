import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qem.info import excess_entropy
from qem.irreversibility import find_witness
from qem.machine import stationary_distribution, statistical_complexity
from qem.processes import coin_lattice, perturbed_coin, random_machine
from qem.quantum import (build_quantum_states, density_matrix, gram_matrix, quantum_complexity,
                         theorem_check)

# mpmath, 50 digits: entropy of {0.5 +- sqrt(p(1-p))}
CQ = {0.25: 0.35457890266526988420, 0.3: 0.25022491161107053615,
      0.49: 0.0014731664298693015298, 0.1: 0.72192809488736234787}


def test_coin_amplitudes():
    p = 0.3
    a = build_quantum_states(perturbed_coin(p)).tensor()  # [j, r, k]
    assert a[0, 0, 0] == pytest.approx(np.sqrt(1 - p))
    assert a[0, 1, 1] == pytest.approx(np.sqrt(p))
    assert np.count_nonzero(a[0]) == 2


def test_states_are_unit_and_nonnegative(coin, alternating, fair_coin):
    for m in (coin, alternating, fair_coin, coin_lattice(2, 0.3)):
        amp = build_quantum_states(m).amplitudes
        np.testing.assert_allclose(np.linalg.norm(amp, axis=1), 1.0, atol=1e-12)
        assert np.all(amp >= 0)


def test_gram_examples(alternating):
    g = gram_matrix(build_quantum_states(perturbed_coin(0.25)))
    assert g[0, 1] == pytest.approx(0.86602540378443864676, abs=1e-15)
    p = 0.1
    assert gram_matrix(build_quantum_states(perturbed_coin(p)))[0, 1] == pytest.approx(2 * np.sqrt(p * (1 - p)))
    np.testing.assert_array_equal(gram_matrix(build_quantum_states(alternating)), np.eye(2))


@pytest.mark.parametrize("p", sorted(CQ))
def test_coin_quantum_complexity(p):
    rep = quantum_complexity(build_quantum_states(perturbed_coin(p)), [0.5, 0.5])
    lam = np.sqrt(p * (1 - p))
    np.testing.assert_allclose(rep.eigenvalues, [0.5 - lam, 0.5 + lam], atol=1e-14)
    assert rep.c_q == pytest.approx(CQ[p], abs=1e-12)


def test_alternating_is_classical(alternating, fair_coin):
    rep = quantum_complexity(build_quantum_states(alternating), [0.5, 0.5])
    assert rep.c_q == pytest.approx(1.0, abs=1e-12)
    assert quantum_complexity(build_quantum_states(fair_coin), [1.0]).c_q == pytest.approx(0.0, abs=1e-12)


def test_weighted_gram_shares_spectrum_with_rho():
    m = random_machine(4, 3, 8)
    q = build_quantum_states(m)
    p = stationary_distribution(m)
    rho = density_matrix(q, p)
    full = np.sort(np.linalg.eigvalsh(rho))[::-1][:4]
    np.testing.assert_allclose(np.sort(quantum_complexity(q, p).eigenvalues)[::-1], full, atol=1e-12)


def test_theorem_check_examples(alternating):
    rec = theorem_check(perturbed_coin(0.3))
    assert rec.witness is not None and rec.c_q < 1 and rec.theorem_holds
    rec = theorem_check(alternating)
    assert rec.witness is None and rec.c_q == pytest.approx(rec.c_mu, abs=1e-9) and rec.theorem_holds
    d = rec.to_dict()
    assert set(d) >= {"c_mu", "e", "c_q", "eigenvalues", "witness", "theorem_holds"}
    assert d["witness"] is None


def test_random_irreversible_four_state_machine():
    rng = np.random.default_rng(4)
    while True:
        m = random_machine(4, 2, rng)
        if find_witness(m) is not None:
            break
    rec = theorem_check(m)
    assert rec.c_q < rec.c_mu - 1e-9 and rec.theorem_holds


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5), m=st.integers(2, 3))
def test_quantum_invariants(seed, n, m):
    machine = random_machine(n, m, seed)
    q = build_quantum_states(machine)
    g = gram_matrix(q)
    T = machine.transitions
    np.testing.assert_allclose(np.diag(g), 1.0, atol=1e-12)
    assert np.all(g >= -1e-15) and np.all(g <= 1 + 1e-12)
    np.testing.assert_allclose(g, g.T, atol=0)
    assert np.linalg.eigvalsh(g).min() > -1e-12
    # overlap formula
    direct = np.einsum("jlr,klr->jk", np.sqrt(T), np.sqrt(T))
    np.testing.assert_allclose(g, direct, atol=1e-14)

    w = find_witness(machine)
    if w is not None:
        assert g[w.j, w.k] >= np.sqrt(T[w.j, w.l, w.r] * T[w.k, w.l, w.r]) - 1e-15
    off = g - np.diag(np.diag(g))
    assert (w is not None) == bool(np.any(off > 1e-12))

    p = stationary_distribution(machine)
    rep = quantum_complexity(q, p)
    assert rep.eigenvalues.min() >= -1e-10
    assert abs(rep.eigenvalues.sum() - 1) < 1e-10
    c_mu = statistical_complexity(machine, p)
    e = excess_entropy(machine, p, t_max=12).value
    assert e - 1e-9 <= rep.c_q <= c_mu + 1e-9
    assert theorem_check(machine, t_max=4).theorem_holds
