"""Quantum prediction protocols: measure-and-prepare sampling and exact constant-entropy evolution.

The machine register holds a state on ``R (x) K`` (dimension ``|Sigma| * N``).
One constant-entropy step applies the channel with Kraus operators
``B_k = |S_k><k|`` to ``K``, which produces a state on ``R1 (x) R2 (x) K``;
``R1`` is the output, and ``R2 (x) K`` becomes the next machine register.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate

import numpy as np

from .errors import NumericalError
from .linalg import von_neumann_entropy
from .machine import EpsilonMachine, SymbolSequence, require_valid, stationary_distribution
from .quantum import QuantumCausalStates, build_quantum_states, density_matrix, gram_matrix

TRACE_TOL = 1e-8

MEASURE_PREPARE = "measure_prepare"
CONSTANT_ENTROPY = "constant_entropy"
MODES = (MEASURE_PREPARE, CONSTANT_ENTROPY)


@dataclass
class ProtocolState:
    rho: np.ndarray | None
    entropy_log: list = field(default_factory=list)
    emitted: SymbolSequence | None = None
    marginals: list = field(default_factory=list)
    state_index: int | None = None


def kraus_operators(qstates: QuantumCausalStates) -> np.ndarray:
    """Stack of ``B_k = |S_k><k|``, shape ``(N, |Sigma| * N, N)``."""
    n = qstates.machine.n_states
    ops = np.zeros((n, qstates.dim, n))
    for k in range(n):
        ops[k, :, k] = qstates.amplitudes[k]
    return ops


def kraus_completeness_error(ops: np.ndarray) -> float:
    """Max-abs deviation of ``sum_k B_k^T B_k`` from the identity."""
    total = np.einsum("kai,kaj->ij", ops, ops)
    return float(np.abs(total - np.eye(ops.shape[2])).max())


def apply_prediction_channel(rho: np.ndarray, qstates: QuantumCausalStates) -> np.ndarray:
    """Apply ``I_R1 (x) sum_k B_k . B_k^T`` to a state on ``R1 (x) K``.

    Returns the joint state on ``R1 (x) (R2 (x) K)`` as a 4-index array
    ``[r, x, r', x']`` with ``x`` running over the ``|Sigma| * N`` basis of
    ``R2 (x) K``.
    """
    m, n = qstates.machine.n_symbols, qstates.machine.n_states
    rho4 = rho.reshape(m, n, m, n)
    a = qstates.amplitudes
    # only the K-diagonal of rho survives the channel
    return np.einsum("rksk,kx,ky->rxsy", rho4, a, a)


def constant_entropy_step(state: ProtocolState, qstates: QuantumCausalStates):
    """Advance the exact constant-entropy protocol by one step.

    Returns the new :class:`ProtocolState` and the outcome distribution of a
    measurement of ``R1`` in the symbol basis. The output register is traced
    out unmeasured, so the evolution never depends on an observed symbol.
    """
    joint = apply_prediction_channel(state.rho, qstates)
    trace = float(np.einsum("rxrx->", joint))
    if abs(trace - 1.0) > TRACE_TOL:
        raise NumericalError(f"protocol step lost trace: {trace!r}")
    marginal = np.einsum("rxrx->r", joint)
    rho = np.einsum("rxry->xy", joint)
    rho = 0.5 * (rho + rho.T)
    step = len(state.entropy_log)
    log = state.entropy_log + [(step + 1, von_neumann_entropy(rho))]
    new = ProtocolState(rho, log, state.emitted, state.marginals + [marginal])
    return new, marginal


def _sampler(qstates: QuantumCausalStates):
    probs = qstates.amplitudes**2
    tables = []
    for row in probs:
        allowed = np.flatnonzero(row > 0)
        tables.append((list(accumulate(row[allowed].tolist())), allowed.tolist()))
    return tables


def measure_prepare_step(qstates: QuantumCausalStates, current: int, rng, _tables=None):
    """Measure ``|S_current>`` in the ``|r>|k>`` basis; return ``(symbol, next_state)``.

    The outcome ``(r, k)`` occurs with probability ``|<r,k|S_j>|**2 = T[j, k, r]``.
    """
    tables = _tables if _tables is not None else _sampler(qstates)
    cdf, allowed = tables[current]
    x = rng.random() * cdf[-1]
    idx = allowed[min(bisect_right(cdf, x), len(allowed) - 1)]
    n = qstates.machine.n_states
    return idx // n, idx % n


def overlap_monotonicity_check(qstates: QuantumCausalStates) -> np.ndarray:
    """``<S'_j|S'_k> - <S_j|S_k>`` for all pairs.

    ``|S'_j> = sum_{k,r} sqrt(T[j,k,r]) |r>|S_k>`` is the image of ``|S_j>``
    under the first step of the constant-entropy protocol.
    """
    n, m = qstates.machine.n_states, qstates.machine.n_symbols
    amp = qstates.tensor()  # [j, r, k]
    lifted = np.einsum("jrk,kx->jrx", amp, qstates.amplitudes).reshape(n, m * qstates.dim)
    return lifted @ lifted.T - gram_matrix(qstates)


def run_protocol(machine: EpsilonMachine, steps: int, mode: str = CONSTANT_ENTROPY,
                 seed=None, initial_state=None) -> ProtocolState:
    """Run either prediction protocol for ``steps`` steps.

    ``constant_entropy`` evolves the density matrix exactly; it starts from
    the stationary mixture ``sum_j p_j |S_j><S_j|`` unless ``initial_state``
    names a state, in which case it starts from the pure ``|S_j>``. It uses
    no randomness.

    ``measure_prepare`` samples symbols; the starting state is
    ``initial_state`` or, if omitted, is drawn from the stationary
    distribution with the same seeded generator.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    mode = mode.replace("-", "_")
    if mode not in MODES:
        raise ValueError(f"unknown protocol mode {mode!r}; expected one of {MODES}")
    require_valid(machine)
    qstates = build_quantum_states(machine)

    if mode == CONSTANT_ENTROPY:
        if initial_state is None:
            weights = stationary_distribution(machine)
        else:
            weights = np.zeros(machine.n_states)
            weights[machine.state_index(initial_state)] = 1.0
        state = ProtocolState(density_matrix(qstates, weights),
                              emitted=SymbolSequence(np.empty(0, dtype=np.int64), None, -1))
        for _ in range(steps):
            state, _ = constant_entropy_step(state, qstates)
        return state

    rng = np.random.default_rng(seed)
    if initial_state is None:
        j = int(rng.choice(machine.n_states, p=stationary_distribution(machine)))
    else:
        j = machine.state_index(initial_state)
    start = j
    tables = _sampler(qstates)
    out = np.empty(steps, dtype=np.int64)
    for i in range(steps):
        out[i], j = measure_prepare_step(qstates, j, rng, tables)
    return ProtocolState(None, emitted=SymbolSequence(out, seed, start), state_index=j)
