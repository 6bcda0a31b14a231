"""Emission/reception configurations and the irreversibility witness search."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .machine import EpsilonMachine


class Configuration(NamedTuple):
    state: int
    symbol: int


class IrreversibilityWitness(NamedTuple):
    """Distinct states ``j`` and ``k`` that both emit ``r`` and land in ``l``."""

    j: int
    k: int
    l: int
    r: int

    def to_dict(self, machine: EpsilonMachine | None = None) -> dict:
        d = self._asdict()
        if machine is not None:
            d["labels"] = {"j": machine.states[self.j], "k": machine.states[self.k],
                           "l": machine.states[self.l], "r": machine.alphabet[self.r]}
        return d


def emission_configurations(machine: EpsilonMachine) -> set:
    """Pairs ``(j, r)`` from which emitting ``r`` has positive probability."""
    return {Configuration(int(j), int(r)) for j, r in np.argwhere(machine.support.any(axis=1))}


def reception_configurations(machine: EpsilonMachine) -> set:
    """Pairs ``(k, r)`` that some state reaches by emitting ``r``."""
    return {Configuration(int(k), int(r)) for k, r in np.argwhere(machine.support.any(axis=0))}


def transition_function(machine: EpsilonMachine, config) -> Configuration:
    j, r = config
    k = machine.successors[j, r]
    if k < 0:
        raise ValueError(f"{tuple(config)} is not a valid emission configuration")
    return Configuration(int(k), int(r))


def find_witness(machine: EpsilonMachine) -> IrreversibilityWitness | None:
    """Smallest ``(j, k, l, r)`` with ``j < k`` and ``T[j,l,r], T[k,l,r] > 0``, or None."""
    supp = machine.support
    n = machine.n_states
    for j in range(n):
        for k in range(j + 1, n):
            shared = np.argwhere(supp[j] & supp[k])  # rows (l, r), lexicographic
            if len(shared):
                l, r = shared[0]
                return IrreversibilityWitness(j, k, int(l), int(r))
    return None


def is_injective(machine: EpsilonMachine) -> bool:
    """Whether the transition function is one-to-one on its domain."""
    images = [transition_function(machine, c) for c in emission_configurations(machine)]
    return len(images) == len(set(images))
