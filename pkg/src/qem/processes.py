"""Ready-built machines and a random epsilon-machine generator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .machine import SUPPORT_FLOOR, EpsilonMachine, validate


@dataclass(frozen=True)
class ProcessSpec:
    name: str
    params: dict
    description: str = ""


def perturbed_coin(p: float) -> EpsilonMachine:
    """A coin that flips with probability ``p`` each step; the face is observed.

    States ``S0``/``S1`` are the current face and the emitted symbol equals the
    new face, so ``T[i, j, j]`` is ``1 - p`` when ``i == j`` and ``p`` otherwise.
    """
    p = float(p)
    if not 0.0 < p < 1.0 or p == 0.5:
        raise ValueError(f"flip probability must satisfy 0 < p < 1 and p != 0.5, got {p}")
    T = np.zeros((2, 2, 2))
    for i in range(2):
        for j in range(2):
            T[i, j, j] = 1.0 - p if i == j else p
    return EpsilonMachine(("0", "1"), T, ("S0", "S1"))


def coin_lattice(K: int, p: float) -> EpsilonMachine:
    """``K`` independent perturbed coins observed jointly.

    States and symbols are lattice configurations encoded as integers in
    ``[0, 2**K)`` with coin 0 in the least significant bit.
    """
    if int(K) != K or not 1 <= K <= 6:
        raise ValueError(f"lattice size K must be an integer in [1, 6], got {K}")
    K = int(K)
    perturbed_coin(p)  # parameter check
    n = 2**K
    T = np.zeros((n, n, n))
    for c in range(n):
        for d in range(n):
            flips = bin(c ^ d).count("1")
            T[c, d, d] = p**flips * (1.0 - p) ** (K - flips)
    labels = [str(c) for c in range(n)]
    return EpsilonMachine(labels, T, [f"S{c}" for c in range(n)])


def alternating_switches() -> EpsilonMachine:
    """Reduced model of the two-switch system: the strictly alternating process.

    ``S0`` emits ``1`` and moves to ``S1``; ``S1`` emits ``0`` and moves to ``S0``.
    """
    T = np.zeros((2, 2, 2))
    T[0, 1, 1] = 1.0
    T[1, 0, 0] = 1.0
    return EpsilonMachine(("0", "1"), T, ("S0", "S1"))


def iid_coin(q: float = 0.5) -> EpsilonMachine:
    """Single-state machine emitting ``1`` with probability ``q``."""
    q = float(q)
    if not 0.0 < q < 1.0:
        raise ValueError(f"bias must satisfy 0 < q < 1, got {q}")
    return EpsilonMachine(("0", "1"), [[[1.0 - q, q]]], ("S0",))


CATALOG = {
    "perturbed-coin": (perturbed_coin, {"p": 0.25},
                       "coin flipping with probability p (0 < p < 1, p != 0.5)"),
    "coin-lattice": (coin_lattice, {"K": 2, "p": 0.25},
                     "K independent perturbed coins (1 <= K <= 6)"),
    "alternating-switches": (alternating_switches, {},
                             "strict 0/1 alternation; reduced two-switch system"),
    "iid-coin": (iid_coin, {"q": 0.5}, "independent coin flips with P(1) = q"),
}


def catalog() -> list:
    return [ProcessSpec(name, dict(defaults), desc) for name, (_, defaults, desc) in CATALOG.items()]


def make(name: str, **params) -> EpsilonMachine:
    try:
        factory, defaults, _ = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown process {name!r}; known: {sorted(CATALOG)}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise TypeError(f"{name} does not take parameters {sorted(unknown)}")
    return factory(**{**defaults, **params})


def catalog_machines() -> dict:
    """One instance per catalog entry at its default parameters."""
    return {spec.name: make(spec.name) for spec in catalog()}


def is_minimal(machine: EpsilonMachine, atol: float = 1e-12) -> bool:
    """True when no two states generate the same future distribution.

    Moore-style partition refinement: states start grouped by next-symbol
    distribution and are split until every block agrees, symbol by symbol,
    on the block of its successor.
    """
    emit = machine.emission_probabilities
    succ = machine.successors
    n = machine.n_states
    block = np.full(n, -1)
    reps = []
    for j in range(n):
        for b, rep in enumerate(reps):
            if np.allclose(emit[j], emit[rep], atol=atol, rtol=0):
                block[j] = b
                break
        else:
            block[j] = len(reps)
            reps.append(j)
    while True:
        succ_block = np.where(succ >= 0, block[np.maximum(succ, 0)], -1)
        keys = {}
        new = np.array([keys.setdefault((block[j], tuple(succ_block[j])), len(keys)) for j in range(n)])
        if len(keys) == len(set(block.tolist())):
            return len(keys) == n
        block = new


def random_machine(n_states: int, n_symbols: int, rng, max_tries: int = 10_000) -> EpsilonMachine:
    """Draw a random ergodic, minimal, unifilar machine.

    Each ``(state, symbol)`` pair is absent with probability 1/3, otherwise it
    gets a uniformly chosen successor. Weights on the present pairs of a state
    are Dirichlet(1, ..., 1). Draws that are non-ergodic, leave a state without
    emissions, or have two states with identical futures are rejected.

    Raises
    ------
    RuntimeError
        If no acceptable draw is found in ``max_tries`` attempts.
    """
    rng = np.random.default_rng(rng)
    alphabet = [str(r) for r in range(n_symbols)]
    for _ in range(max_tries):
        present = rng.random((n_states, n_symbols)) >= 1.0 / 3.0
        if not present.any(axis=1).all():
            continue
        targets = rng.integers(0, n_states, size=(n_states, n_symbols))
        T = np.zeros((n_states, n_states, n_symbols))
        for j in range(n_states):
            syms = np.flatnonzero(present[j])
            w = rng.dirichlet(np.ones(len(syms)))
            # keep every present pair strictly inside the support
            if np.any(w <= 1e3 * SUPPORT_FLOOR):
                break
            T[j, targets[j, syms], syms] = w
        else:
            m = EpsilonMachine(alphabet, T)
            if not validate(m) and is_minimal(m):
                return m
    raise RuntimeError(f"no valid {n_states}-state, {n_symbols}-symbol machine in {max_tries} draws")


def random_machine_suite(count: int, seed, max_states: int = 5, max_symbols: int = 3) -> list:
    """``count`` random machines with sizes drawn from ``[1, max_states] x [2, max_symbols]``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(1, max_states + 1))
        m = int(rng.integers(2, max_symbols + 1))
        try:
            out.append(random_machine(n, m, rng, max_tries=1000))
        except RuntimeError:
            continue
    return out

