import numpy as np
import pytest

from qem.machine import simulate, statistical_complexity, validate
from qem.processes import (alternating_switches, catalog, catalog_machines, coin_lattice, iid_coin,
                           is_minimal, make, perturbed_coin, random_machine)
from qem.quantum import build_quantum_states, quantum_complexity


def test_perturbed_coin_entries():
    T = perturbed_coin(0.25).transitions
    assert T[0, 0, 0] == 0.75 and T[0, 1, 1] == 0.25
    assert T[1, 1, 1] == 0.75 and T[1, 0, 0] == 0.25
    assert T[0, 0, 1] == 0 and T[0, 1, 0] == 0


@pytest.mark.parametrize("p", [0.0, 0.5, 1.0, -0.1, 1.5])
def test_perturbed_coin_rejects(p):
    with pytest.raises(ValueError):
        perturbed_coin(p)


def test_coin_lattice():
    m = coin_lattice(2, 0.3)
    assert m.n_states == 4 and m.n_symbols == 4
    assert statistical_complexity(m) == pytest.approx(2.0, abs=1e-12)
    # configuration 1 -> 3 flips coin 1 only (bit 1), coin 0 stays
    assert m.transitions[1, 3, 3] == pytest.approx(0.7 * 0.3)
    np.testing.assert_array_equal(coin_lattice(1, 0.3).transitions, perturbed_coin(0.3).transitions)
    with pytest.raises(ValueError):
        coin_lattice(7, 0.3)
    with pytest.raises(ValueError):
        coin_lattice(0, 0.3)


def test_lattice_cq_is_additive():
    single = quantum_complexity(build_quantum_states(perturbed_coin(0.3)), [0.5, 0.5]).c_q
    pair = quantum_complexity(build_quantum_states(coin_lattice(2, 0.3)), np.full(4, 0.25)).c_q
    assert pair == pytest.approx(2 * single, abs=1e-9)


def test_lattice_per_coin_marginals():
    K, p, n = 3, 0.2, 200_000
    seq = simulate(coin_lattice(K, p), 0, n, seed=8).symbols
    for i in range(K):
        bits = (seq >> i) & 1
        rate = np.mean(bits[1:] != bits[:-1])
        assert abs(rate - p) < 3 * np.sqrt(p * (1 - p) / (n - 1))


def test_alternating_and_iid():
    assert statistical_complexity(alternating_switches()) == pytest.approx(1.0)
    m = iid_coin(0.3)
    assert m.n_states == 1
    assert m.transitions[0, 0, 1] == pytest.approx(0.3)
    with pytest.raises(ValueError):
        iid_coin(1.0)


def test_catalog_machines_are_valid():
    names = [s.name for s in catalog()]
    assert names == ["perturbed-coin", "coin-lattice", "alternating-switches", "iid-coin"]
    for m in catalog_machines().values():
        assert validate(m) == []
    assert make("coin-lattice", K=3, p=0.1).n_states == 8
    with pytest.raises(KeyError):
        make("nope")
    with pytest.raises(TypeError):
        make("iid-coin", p=0.2)


def test_is_minimal():
    assert is_minimal(perturbed_coin(0.25))
    T = np.zeros((2, 2, 1))
    T[0, 1, 0] = T[1, 0, 0] = 1.0
    from qem.machine import EpsilonMachine
    assert not is_minimal(EpsilonMachine(["a"], T))


def test_random_machine_is_valid_and_minimal():
    rng = np.random.default_rng(0)
    for _ in range(50):
        m = random_machine(int(rng.integers(1, 6)), int(rng.integers(2, 4)), rng)
        assert validate(m) == [] and is_minimal(m)
