import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qem.info import excess_entropy
from qem.irreversibility import (Configuration, IrreversibilityWitness, emission_configurations,
                                 find_witness, is_injective, reception_configurations,
                                 transition_function)
from qem.processes import perturbed_coin, random_machine


def test_emission_configurations(coin, alternating, fair_coin):
    assert emission_configurations(coin) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert emission_configurations(alternating) == {(0, 1), (1, 0)}
    assert emission_configurations(fair_coin) == {(0, 0), (0, 1)}


def test_reception_configurations(alternating):
    assert reception_configurations(alternating) == {(1, 1), (0, 0)}


def test_transition_function(coin, alternating):
    for p in (0.1, 0.25, 0.7):
        assert transition_function(perturbed_coin(p), (0, 1)) == Configuration(1, 1)
    assert transition_function(alternating, Configuration(0, 1)) == (1, 1)
    with pytest.raises(ValueError):
        transition_function(alternating, (0, 0))


def test_transition_function_total_on_domain(coin):
    for c in emission_configurations(coin):
        transition_function(coin, c)


def test_find_witness(coin, alternating, fair_coin):
    assert find_witness(coin) == IrreversibilityWitness(0, 1, 0, 0)
    assert find_witness(alternating) is None
    assert find_witness(fair_coin) is None


def _injective_by_enumeration(machine):
    images = {}
    T = machine.transitions
    for j, k, r in itertools.product(range(machine.n_states), range(machine.n_states), range(machine.n_symbols)):
        if T[j, k, r] > 1e-12:
            if (k, r) in images and images[(k, r)] != j:
                return False
            images[(k, r)] = j
    return True


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5), m=st.integers(2, 3))
def test_witness_iff_not_injective(seed, n, m):
    machine = random_machine(n, m, seed)
    w = find_witness(machine)
    assert (w is None) == _injective_by_enumeration(machine) == is_injective(machine)
    if w is not None:
        T = machine.transitions
        assert w.j < w.k
        assert T[w.j, w.l, w.r] > 0 and T[w.k, w.l, w.r] > 0


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5), m=st.integers(2, 3))
def test_witness_and_excess_entropy_gap(seed, n, m):
    # a witness forces a strict gap; without one the gap vanishes wherever the
    # finite-horizon estimate has converged
    machine = random_machine(n, m, seed)
    est = excess_entropy(machine, t_max=16)
    gap = est.c_mu - est.value
    if find_witness(machine) is not None:
        assert gap > 1e-6
    elif est.converged:
        assert gap < 1e-6
