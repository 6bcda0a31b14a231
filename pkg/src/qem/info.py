"""Excess entropy through the decay of H(S_{-1} | X_0 ... X_{t-1}).

``S_{-1}`` is the causal state just before the first observed symbol. For an
epsilon-machine ``C_mu - E = lim_t H(S_{-1} | X_0^t)``, so ``E`` follows from
the posterior uncertainty about the initial state once enough of the future
has been seen.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EnumerationBudgetExceeded
from .machine import EpsilonMachine, shannon_entropy, stationary_distribution

ENUMERATION_BUDGET = 2**24
DEFAULT_TOL = 1e-10
MONTE_CARLO_SAMPLES = 10**6

# posteriors agreeing to this many decimals are treated as the same word class
_MERGE_DECIMALS = 14


def binary_entropy(p: float) -> float:
    """``-p log2 p - (1-p) log2 (1-p)`` with ``0 log 0 = 0``."""
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return shannon_entropy([p, 1.0 - p])


def _row_entropies(post: np.ndarray) -> np.ndarray:
    safe = np.where(post > 0, post, 1.0)
    return -np.sum(post * np.log2(safe), axis=1)


def default_horizon(machine: EpsilonMachine) -> int:
    """20 for binary alphabets; larger alphabets keep ``|Sigma|**t`` near ``2**20``."""
    m = machine.n_symbols
    if m <= 2:
        return 20
    return max(1, int(20 / math.log2(m)))


def conditional_entropy_trace(machine: EpsilonMachine, stationary, t_max: int,
                              budget: int = ENUMERATION_BUDGET) -> np.ndarray:
    """Exact ``H(S_{-1} | X_0^t)`` for ``t = 0 .. t_max`` by word enumeration.

    Every word ``w`` of positive probability carries the unnormalized
    posterior ``p_s P(w | S_{-1} = s)``, extended one symbol at a time by
    forward products over the transition tensor. Two bookkeeping steps keep
    this exact while avoiding the full ``|Sigma|**t`` blow-up:

    * words whose posterior and start-to-current state map coincide evolve
      identically, so they are merged with their probabilities summed;
    * once every start state compatible with ``w`` sits in the same current
      state, later symbols no longer change the posterior, and the word's
      contribution is frozen.

    Raises
    ------
    EnumerationBudgetExceeded
        If more than ``budget`` distinct live words are needed at some level.
    """
    p = np.asarray(stationary, dtype=float)
    n = machine.n_states
    emit = machine.emission_probabilities
    succ = machine.successors

    weight = np.ones(1)
    post = p[None, :].copy()
    cur = np.arange(n)[None, :]
    frozen = []
    trace = [shannon_entropy(p)]

    for _ in range(t_max):
        if weight.size == 0:
            trace.append(trace[-1])
            continue
        live = cur >= 0
        c = np.where(live, cur, 0)
        parts_w, parts_post, parts_cur = [], [], []
        for r in range(machine.n_symbols):
            f = np.where(live, emit[c, r], 0.0)
            un = post * f
            z = un.sum(axis=1)
            keep = z > 0
            if not keep.any():
                continue
            f = f[keep]
            parts_w.append(weight[keep] * z[keep])
            parts_post.append(un[keep] / z[keep, None])
            parts_cur.append(np.where(f > 0, succ[c[keep], r], -1))
        weight = np.concatenate(parts_w)
        post = np.concatenate(parts_post)
        cur = np.concatenate(parts_cur)

        hi = np.where(cur >= 0, cur, -1).max(axis=1)
        lo = np.where(cur >= 0, cur, n).min(axis=1)
        synced = hi == lo
        if synced.any():
            frozen.append(np.sum(weight[synced] * _row_entropies(post[synced])))
            weight, post, cur = weight[~synced], post[~synced], cur[~synced]

        if weight.size:
            key = np.hstack([cur.astype(float), np.round(post, _MERGE_DECIMALS)])
            _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
            weight = np.bincount(inverse.ravel(), weights=weight, minlength=first.size)
            post, cur = post[first], cur[first]
            if weight.size > budget:
                raise EnumerationBudgetExceeded(
                    f"{weight.size} live words exceed the enumeration budget of {budget}")

        live_part = np.sum(weight * _row_entropies(post)) if weight.size else 0.0
        trace.append(float(np.sum(np.array(frozen + [live_part]))))
    return np.array(trace)


def conditional_initial_state_entropy(machine: EpsilonMachine, stationary, t: int,
                                      budget: int = ENUMERATION_BUDGET) -> float:
    """Exact ``H(S_{-1} | X_0^t)`` in bits (see :func:`conditional_entropy_trace`)."""
    if t < 1:
        raise ValueError("horizon t must be >= 1")
    return float(conditional_entropy_trace(machine, stationary, t, budget)[t])


def monte_carlo_entropy_trace(machine: EpsilonMachine, stationary, t_max: int,
                              n_samples: int = MONTE_CARLO_SAMPLES, seed=0,
                              chunk: int = 100_000) -> np.ndarray:
    """Sampled estimate of ``H(S_{-1} | X_0^t)`` for ``t = 0 .. t_max``.

    Draws ``S_{-1}`` from the stationary distribution, runs the machine, and
    forward-filters the posterior over the initial state along each sampled
    word; the estimate at each ``t`` is the mean posterior entropy.
    """
    p = np.asarray(stationary, dtype=float)
    rng = np.random.default_rng(seed)
    n = machine.n_states
    emit = machine.emission_probabilities
    cdf = np.cumsum(emit, axis=1)
    succ = machine.successors
    totals = np.zeros(t_max + 1)
    done = 0
    while done < n_samples:
        size = min(chunk, n_samples - done)
        state = rng.choice(n, size=size, p=p)
        post = np.broadcast_to(p, (size, n)).copy()
        cur = np.broadcast_to(np.arange(n), (size, n)).copy()
        totals[0] += size * shannon_entropy(p)
        for t in range(1, t_max + 1):
            u = rng.random(size) * cdf[state, -1]
            sym = np.minimum((u[:, None] >= cdf[state]).sum(axis=1), machine.n_symbols - 1)
            live = cur >= 0
            c = np.where(live, cur, 0)
            f = np.where(live, emit[c, sym[:, None]], 0.0)
            post = post * f
            post /= post.sum(axis=1, keepdims=True)
            cur = np.where(f > 0, succ[c, sym[:, None]], -1)
            state = succ[state, sym]
            totals[t] += _row_entropies(post).sum()
        done += size
    return totals / n_samples


@dataclass
class ExcessEntropyEstimate:
    value: float
    trace: list = field(default_factory=list)
    converged: bool = False
    horizon_used: int = 0
    approximate: bool = False
    c_mu: float = 0.0

    def to_dict(self):
        return {"value": self.value, "converged": self.converged,
                "horizon_used": self.horizon_used, "approximate": self.approximate,
                "trace": [[t, h] for t, h in self.trace]}


def excess_entropy(machine: EpsilonMachine, stationary=None, tol: float = DEFAULT_TOL,
                   t_max: int | None = None, budget: int = ENUMERATION_BUDGET,
                   method: str = "exact", n_samples: int = MONTE_CARLO_SAMPLES,
                   seed=0) -> ExcessEntropyEstimate:
    """Estimate the excess entropy ``E = C_mu - H(S_{-1} | X_0^{t*})``.

    ``t*`` is the first horizon at which the conditional entropy changes by
    less than ``tol``; if that never happens up to ``t_max`` the value at
    ``t_max`` is used and ``converged`` is False.

    ``method`` is ``"exact"`` (enumeration, raises on budget overflow),
    ``"monte-carlo"``, or ``"auto"`` (exact, falling back to sampling, in
    which case the estimate is flagged ``approximate``).
    """
    if stationary is None:
        stationary = stationary_distribution(machine)
    if t_max is None:
        t_max = default_horizon(machine)
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    approximate = False
    if method == "exact":
        trace = conditional_entropy_trace(machine, stationary, t_max, budget)
    elif method == "auto":
        try:
            trace = conditional_entropy_trace(machine, stationary, t_max, budget)
        except EnumerationBudgetExceeded:
            trace = monte_carlo_entropy_trace(machine, stationary, t_max, n_samples, seed)
            approximate = True
    elif method == "monte-carlo":
        trace = monte_carlo_entropy_trace(machine, stationary, t_max, n_samples, seed)
        approximate = True
    else:
        raise ValueError(f"unknown method {method!r}")

    c_mu = float(trace[0])
    horizon, converged = t_max, False
    for t in range(1, t_max + 1):
        if abs(trace[t] - trace[t - 1]) < tol:
            horizon, converged = t, True
            break
    pairs = [(t, float(trace[t])) for t in range(horizon + 1)]
    return ExcessEntropyEstimate(value=c_mu - float(trace[horizon]), trace=pairs,
                                 converged=converged, horizon_used=horizon,
                                 approximate=approximate, c_mu=c_mu)
