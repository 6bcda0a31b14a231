import numpy as np
import pytest

from qem.errors import EnumerationBudgetExceeded
from qem.inference import InferenceConfig, infer_machine
from qem.machine import simulate, validate
from qem.processes import alternating_switches, iid_coin, perturbed_coin, random_machine


@pytest.fixture(scope="module")
def coin_data():
    return simulate(perturbed_coin(0.25), 0, 1_000_000, seed=5)


def test_config_validation():
    for kwargs in ({"history_length": 0}, {"future_length": 0}, {"merge_tolerance": 0.0},
                   {"merge_tolerance": 1.0}, {"min_count": 0}):
        with pytest.raises(ValueError):
            InferenceConfig(**kwargs)


def test_coin_recovery(coin_data):
    machine, diag = infer_machine(coin_data, InferenceConfig(1, 3, 0.05))
    assert diag.n_clusters == 2 and machine.n_states == 2
    assert validate(machine) == []
    T = machine.transitions
    for j in range(2):
        stay = T[j, j].sum()
        assert abs((1 - stay) - 0.25) < 0.01
    assert diag.min_between_distance > 0.05 and diag.repairs == []


def test_alternating_recovery():
    seq = simulate(alternating_switches(), 0, 100_000, seed=1)
    machine, diag = infer_machine(seq, InferenceConfig(1, 1))
    assert diag.n_clusters == 2
    T = machine.transitions
    assert set(np.unique(T).tolist()) == {0.0, 1.0}


def test_iid_single_cluster():
    seq = simulate(iid_coin(0.5), 0, 1_000_000, seed=2)
    machine, diag = infer_machine(seq, InferenceConfig(3, 3, 0.05))
    assert diag.n_clusters == 1 and machine.n_states == 1
    assert machine.transitions[0, 0, 1] == pytest.approx(0.5, abs=0.01)


def test_string_input_and_alphabet():
    machine, diag = infer_machine("ab" * 500, InferenceConfig(1, 1))
    assert machine.alphabet == ("a", "b")
    assert diag.members == [["a"], ["b"]]
    with pytest.raises(ValueError):
        infer_machine("abc", alphabet=["a", "b"])


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_errors():
    with pytest.raises(ValueError):
        infer_machine("")
    with pytest.raises(ValueError):
        infer_machine("0101", InferenceConfig(min_count=100))
    with pytest.raises(EnumerationBudgetExceeded):
        infer_machine(np.arange(3).repeat(4), InferenceConfig(12, 12), alphabet=["0", "1", "2"])


def test_short_sequence_warns():
    with pytest.warns(UserWarning):
        _, diag = infer_machine("0110" * 20, InferenceConfig(2, 2, min_count=10))
    assert diag.warnings


def test_repairs_keep_machine_valid():
    rng = np.random.default_rng(3)
    for _ in range(8):
        gen = random_machine(int(rng.integers(2, 5)), 2, rng)
        seq = simulate(gen, 0, 20_000, seed=int(rng.integers(1000)))
        for cfg in (InferenceConfig(1, 1, 0.05), InferenceConfig(2, 2, 0.2), InferenceConfig(3, 1, 0.3)):
            machine, diag = infer_machine(seq, cfg)
            assert validate(machine) == []
            assert all(r["kind"] in ("unifilarity", "ergodicity") for r in diag.repairs)


def test_self_consistency(coin_data):
    cfg = InferenceConfig(1, 3, 0.05)
    first, diag = infer_machine(coin_data, cfg)
    again, diag2 = infer_machine(simulate(first, 0, 1_000_000, seed=11), cfg)
    assert diag2.n_clusters == diag.n_clusters


def test_error_shrinks_with_length():
    truth = perturbed_coin(0.25).transitions
    errors = []
    for n in (10_000, 1_000_000):
        machine, _ = infer_machine(simulate(perturbed_coin(0.25), 0, n, seed=13), InferenceConfig(1, 3))
        errors.append(np.abs(machine.transitions - truth).max())
    assert errors[1] < errors[0]
