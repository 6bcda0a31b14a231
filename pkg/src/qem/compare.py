"""Block statistics of symbol sequences and an L1 indistinguishability test."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .machine import EpsilonMachine, SymbolSequence, simulate, stationary_distribution
from .protocol import MEASURE_PREPARE, run_protocol


@dataclass(frozen=True)
class BlockDistribution:
    block_length: int
    counts: dict
    total: int

    def frequencies(self) -> dict:
        return {w: c / self.total for w, c in self.counts.items()}


def block_distribution(sequence, block_length: int) -> BlockDistribution:
    """Sliding-window counts of every length-``block_length`` word.

    Words are keyed as tuples of the input's symbols (characters for a
    string, integers for an index array).
    """
    if isinstance(sequence, SymbolSequence):
        sequence = sequence.symbols
    if block_length < 1:
        raise ValueError("block_length must be >= 1")
    values = list(sequence) if isinstance(sequence, str) else np.asarray(sequence)
    n = len(values)
    if n < block_length:
        raise ValueError(f"sequence of length {n} is shorter than block length {block_length}")
    labels, codes = np.unique(np.asarray(values), return_inverse=True)
    codes = codes.ravel().astype(np.int64)
    base = len(labels)
    word = np.zeros(n - block_length + 1, dtype=np.int64)
    for i in range(block_length):
        word = word * base + codes[i:n - block_length + 1 + i]
    uniq, cnt = np.unique(word, return_counts=True)
    counts = {}
    for w, c in zip(uniq.tolist(), cnt.tolist()):
        digits = []
        for _ in range(block_length):
            w, d = divmod(w, base)
            digits.append(labels[d].item())
        counts[tuple(reversed(digits))] = c
    return BlockDistribution(block_length, counts, int(cnt.sum()))


def l1_distance(a: BlockDistribution, b: BlockDistribution) -> float:
    if a.block_length != b.block_length:
        raise ValueError(f"block lengths differ: {a.block_length} vs {b.block_length}")
    words = set(a.counts) | set(b.counts)
    return float(sum(abs(a.counts.get(w, 0) / a.total - b.counts.get(w, 0) / b.total)
                     for w in sorted(words)))


@dataclass(frozen=True)
class EquivalenceResult:
    passed: bool
    distance: float
    threshold: float
    block_length: int
    n_a: int
    n_b: int

    def to_dict(self):
        return {"pass": self.passed, "distance": self.distance, "threshold": self.threshold,
                "block_length": self.block_length, "n_a": self.n_a, "n_b": self.n_b}


def equivalence_test(gen_a, gen_b, n_samples: int, block_length: int, threshold: float,
                     seed, seed_b=None) -> EquivalenceResult:
    """Compare two generators by the L1 distance of their block distributions.

    Each generator is called as ``gen(n_samples, seed)`` and returns a symbol
    sequence. ``gen_b`` gets ``seed_b`` when given and ``seed`` otherwise.
    Passes when the distance is strictly below ``threshold``.
    """
    seq_a = gen_a(n_samples, seed)
    seq_b = gen_b(n_samples, seed if seed_b is None else seed_b)
    da = block_distribution(seq_a, block_length)
    db = block_distribution(seq_b, block_length)
    d = l1_distance(da, db)
    return EquivalenceResult(d < threshold, d, threshold, block_length, len(seq_a), len(seq_b))


def classical_generator(machine: EpsilonMachine):
    """Sampler running the classical machine from a stationary-distributed start state."""
    p = stationary_distribution(machine)

    def generate(n, seed):
        rng = np.random.default_rng(seed)
        start = int(rng.choice(machine.n_states, p=p))
        return simulate(machine, start, n, int(rng.integers(2**63))).symbols

    return generate


def quantum_generator(machine: EpsilonMachine):
    """Sampler running the measure-and-prepare quantum protocol."""

    def generate(n, seed):
        return run_protocol(machine, n, MEASURE_PREPARE, seed=seed).emitted.symbols

    return generate


GENERATORS = {"classical": classical_generator, "quantum": quantum_generator}
