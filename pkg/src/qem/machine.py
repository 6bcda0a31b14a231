"""Classical epsilon-machines: data model, validation, stationary statistics, sampling.

A machine with ``N`` states over alphabet ``Sigma`` is stored as a dense tensor
``T[j, k, r]``: the probability that, from state ``j``, the machine emits symbol
``r`` and moves to state ``k``.
"""
from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, MachineValidationError

#: entries at or below this are structural zeros
SUPPORT_FLOOR = 1e-12
NORMALIZATION_TOL = 1e-12

STATIONARY_TOL = 1e-13
STATIONARY_MAX_ITER = 10**6
STATIONARY_DAMPING = 0.5


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: tuple
    message: str

    def __str__(self):
        return f"{self.kind} violation at {self.indices}: {self.message}"

    def to_dict(self):
        return {"kind": self.kind, "indices": list(self.indices), "message": self.message}


@dataclass(frozen=True, eq=False)
class EpsilonMachine:
    """Unifilar stochastic automaton.

    Parameters
    ----------
    alphabet : sequence of str
        Distinct symbol labels; the position of a label is its index.
    transitions : array_like, shape (N, N, |alphabet|)
        ``transitions[j, k, r]`` is the probability of emitting ``r`` and
        moving from state ``j`` to state ``k``.
    states : sequence of str, optional
        State labels, defaulting to ``S0, S1, ...``.

    Construction does not check the invariants; call :func:`validate` or
    :func:`require_valid` for that. The tensor is stored read-only.
    """

    alphabet: tuple
    transitions: np.ndarray
    states: tuple = field(default=None)

    def __post_init__(self):
        T = np.array(self.transitions, dtype=float)
        if T.ndim != 3:
            raise ValueError(f"transition tensor must be 3-dimensional, got shape {T.shape}")
        T.setflags(write=False)
        object.__setattr__(self, "transitions", T)
        object.__setattr__(self, "alphabet", tuple(str(a) for a in self.alphabet))
        states = self.states
        if states is None:
            states = [f"S{j}" for j in range(T.shape[0])]
        object.__setattr__(self, "states", tuple(str(s) for s in states))

    @property
    def n_states(self) -> int:
        return self.transitions.shape[0]

    @property
    def n_symbols(self) -> int:
        return len(self.alphabet)

    @property
    def support(self) -> np.ndarray:
        """Boolean mask of structurally nonzero transitions, shape (N, N, |Sigma|)."""
        return self.transitions > SUPPORT_FLOOR

    @property
    def emission_probabilities(self) -> np.ndarray:
        """``P(r | j)`` as an (N, |Sigma|) array."""
        return self.transitions.sum(axis=1)

    @property
    def successors(self) -> np.ndarray:
        """(N, |Sigma|) int array of unifilar successors, -1 where ``(j, r)`` cannot occur.

        If a pair has several positive successors (an invalid machine) the
        first one is reported.
        """
        supp = self.support
        succ = np.argmax(supp, axis=1)
        succ[~supp.any(axis=1)] = -1
        return succ

    @property
    def marginal_matrix(self) -> np.ndarray:
        """Symbol-marginal state transition matrix ``M[j, k] = sum_r T[j, k, r]``."""
        return self.transitions.sum(axis=2)

    def symbol_index(self, label) -> int:
        try:
            return self.alphabet.index(str(label))
        except ValueError:
            raise KeyError(f"unknown symbol {label!r}") from None

    def state_index(self, label) -> int:
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < self.n_states:
                raise IndexError(f"state index {label} out of range")
            return int(label)
        try:
            return self.states.index(str(label))
        except ValueError:
            raise KeyError(f"unknown state {label!r}") from None

    def __repr__(self):
        return (f"EpsilonMachine(states={list(self.states)}, "
                f"alphabet={list(self.alphabet)})")


@dataclass(frozen=True)
class SymbolSequence:
    symbols: np.ndarray
    seed: object
    initial_state: int

    def __len__(self):
        return len(self.symbols)

    def labels(self, machine: EpsilonMachine) -> list:
        return [machine.alphabet[i] for i in self.symbols]


def _strongly_connected(adjacency: np.ndarray) -> bool:
    n = adjacency.shape[0]
    reach = adjacency | np.eye(n, dtype=bool)
    # transitive closure by repeated squaring
    for _ in range(max(1, int(np.ceil(np.log2(max(n, 2)))) + 1)):
        reach = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
    return bool(reach.all())


def validate(machine: EpsilonMachine) -> list:
    """Return every invariant violation of ``machine``; empty means valid."""
    T = machine.transitions
    out = []
    n, n2, m = T.shape
    if n < 1 or n != n2:
        return [Violation("shape", tuple(T.shape), "transition tensor must have shape (N, N, |alphabet|)")]
    if m != machine.n_symbols or m < 1:
        return [Violation("shape", (m, machine.n_symbols), "symbol axis does not match alphabet")]
    if len(set(machine.alphabet)) != m:
        out.append(Violation("alphabet", (), "symbol labels must be unique"))
    if len(machine.states) != n or len(set(machine.states)) != n:
        out.append(Violation("states", (), "state labels must be unique, one per state"))
    if not np.all(np.isfinite(T)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(T))[0])
        return out + [Violation("range", bad, "non-finite probability")]

    for idx in np.argwhere((T < 0) | (T > 1)):
        j, k, r = (int(i) for i in idx)
        out.append(Violation("range", (j, k, r), f"T={T[j, k, r]!r} outside [0, 1]"))

    row_sums = T.sum(axis=(1, 2))
    for j in np.flatnonzero(np.abs(row_sums - 1.0) > NORMALIZATION_TOL):
        out.append(Violation("normalization", (int(j),), f"outgoing probability sums to {row_sums[j]!r}"))

    n_targets = machine.support.sum(axis=1)
    for j, r in np.argwhere(n_targets > 1):
        targets = np.flatnonzero(machine.support[j, :, r]).tolist()
        out.append(Violation("unifilarity", (int(j), int(r)),
                             f"symbol {machine.alphabet[r]!r} leads to states {targets}"))

    if not _strongly_connected(machine.support.any(axis=2)):
        out.append(Violation("ergodicity", (), "positive-probability transition graph is not strongly connected"))
    return out


def require_valid(machine: EpsilonMachine) -> EpsilonMachine:
    violations = validate(machine)
    if violations:
        raise MachineValidationError(violations)
    return machine


def stationary_distribution(machine: EpsilonMachine, tol: float = STATIONARY_TOL,
                            max_iter: int = STATIONARY_MAX_ITER) -> np.ndarray:
    """Stationary distribution over states by damped power iteration.

    Iterates ``p <- (1 - a) p + a p M`` from the uniform vector with mixing
    coefficient ``a = 0.5``; the damping removes the oscillation periodic
    chains would otherwise show and leaves the fixed point unchanged. Stops
    when the L1 change drops below ``tol``.

    Raises
    ------
    ConvergenceError
        If ``max_iter`` iterations pass without convergence.
    """
    M = machine.marginal_matrix
    n = M.shape[0]
    a = STATIONARY_DAMPING
    p = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = (1.0 - a) * p + a * (p @ M)
        nxt /= nxt.sum()
        if np.abs(nxt - p).sum() < tol:
            return nxt
        p = nxt
    raise ConvergenceError(
        f"stationary distribution did not converge in {max_iter} iterations "
        "(machine may be non-ergodic or ill-conditioned)")


def shannon_entropy(p) -> float:
    """Shannon entropy in bits with the ``0 log 0 = 0`` convention."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return max(float(-np.sum(nz * np.log2(nz))), 0.0)


def statistical_complexity(machine: EpsilonMachine, stationary=None) -> float:
    """Entropy (bits) of the stationary causal-state distribution."""
    if stationary is None:
        stationary = stationary_distribution(machine)
    return shannon_entropy(stationary)


def next_symbol_distribution(machine: EpsilonMachine, state) -> np.ndarray:
    j = machine.state_index(state)
    return machine.emission_probabilities[j].copy()


def simulate(machine: EpsilonMachine, initial_state, length: int, seed=None) -> SymbolSequence:
    """Sample ``length`` symbols starting from ``initial_state``.

    Symbols are drawn from ``P(r | current)`` by inverse CDF on uniforms from
    ``numpy.random.default_rng(seed)``; the state then moves to its unique
    successor. Output is a deterministic function of ``seed``.
    """
    j = machine.state_index(initial_state)
    if length < 0:
        raise ValueError("length must be non-negative")
    emit = machine.emission_probabilities
    succ = machine.successors.tolist()
    tables = []
    for row in emit:
        allowed = np.flatnonzero(row > SUPPORT_FLOOR)
        tables.append((list(accumulate(row[allowed].tolist())), allowed.tolist()))
    u = np.random.default_rng(seed).random(length).tolist()
    out = np.empty(length, dtype=np.int64)
    state = j
    for i, x in enumerate(u):
        cdf, allowed = tables[state]
        r = allowed[min(bisect_right(cdf, x * cdf[-1]), len(allowed) - 1)]
        out[i] = r
        state = succ[state][r]
    return SymbolSequence(out, seed, j)


# --- JSON interchange ---------------------------------------------------

def machine_to_dict(machine: EpsilonMachine) -> dict:
    T = machine.transitions
    edges = []
    for j in range(machine.n_states):
        for r in range(machine.n_symbols):
            for k in range(machine.n_states):
                if T[j, k, r] > 0:
                    edges.append({"from": machine.states[j], "symbol": machine.alphabet[r],
                                  "to": machine.states[k], "p": float(T[j, k, r])})
    return {"alphabet": list(machine.alphabet), "states": list(machine.states), "edges": edges}


def machine_from_dict(data: dict, check: bool = True) -> EpsilonMachine:
    """Build a machine from the sparse edge-list form, densifying the tensor.

    With ``check`` (default) the invariants are enforced and
    :class:`MachineValidationError` is raised on failure.
    """
    try:
        alphabet = [str(a) for a in data["alphabet"]]
        states = [str(s) for s in data["states"]]
        edges = data["edges"]
    except (KeyError, TypeError) as exc:
        raise MachineValidationError([Violation("format", (), f"missing or malformed field: {exc}")]) from None
    sym = {a: i for i, a in enumerate(alphabet)}
    st = {s: i for i, s in enumerate(states)}
    T = np.zeros((len(states), len(states), len(alphabet)))
    problems = []
    if len(sym) != len(alphabet):
        problems.append(Violation("alphabet", (), "duplicate symbol labels"))
    if len(st) != len(states):
        problems.append(Violation("states", (), "duplicate state labels"))
    for n, e in enumerate(edges):
        try:
            j, r, k = st[str(e["from"])], sym[str(e["symbol"])], st[str(e["to"])]
            p = float(e["p"])
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(Violation("format", (n,), f"bad edge {e!r}: {exc}"))
            continue
        if T[j, k, r] != 0:
            problems.append(Violation("format", (n,), "duplicate edge"))
        T[j, k, r] = p
    if problems:
        raise MachineValidationError(problems)
    if not states or not alphabet:
        raise MachineValidationError([Violation("shape", (len(states), len(alphabet)),
                                                "machine needs at least one state and one symbol")])
    machine = EpsilonMachine(alphabet, T, states)
    return require_valid(machine) if check else machine


def dumps_machine(machine: EpsilonMachine) -> str:
    return json.dumps(machine_to_dict(machine), indent=2) + "\n"


def save_machine(machine: EpsilonMachine, path) -> None:
    Path(path).write_text(dumps_machine(machine))


def load_machine(path, check: bool = True) -> EpsilonMachine:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MachineValidationError([Violation("format", (), f"invalid JSON: {exc}")]) from None
    return machine_from_dict(data, check=check)
