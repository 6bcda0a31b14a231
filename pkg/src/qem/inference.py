"""Reconstruct an epsilon-machine from data by grouping histories with similar futures.

Histories of length ``L`` are clustered greedily on the L1 distance between
their empirical length-``F`` future distributions, and transition
probabilities are estimated from cluster-to-cluster counts. This is a
deliberately simple reconstruction, not a statistically calibrated one.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EnumerationBudgetExceeded
from .info import ENUMERATION_BUDGET
from .machine import EpsilonMachine, SymbolSequence, validate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class InferenceConfig:
    history_length: int = 1
    future_length: int = 1
    merge_tolerance: float = 0.05
    min_count: int = 10

    def __post_init__(self):
        if self.history_length < 1 or self.future_length < 1:
            raise ValueError("history and future lengths must be >= 1")
        if not 0.0 < self.merge_tolerance < 1.0:
            raise ValueError("merge_tolerance must lie in (0, 1)")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")


@dataclass
class InferenceDiagnostics:
    n_clusters: int
    occupancy: list
    members: list
    repairs: list = field(default_factory=list)
    max_within_distance: float = 0.0
    min_between_distance: float | None = None
    excluded_histories: int = 0
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "n_clusters": self.n_clusters,
            "occupancy": self.occupancy,
            "members": self.members,
            "repairs": self.repairs,
            "max_within_distance": self.max_within_distance,
            "min_between_distance": self.min_between_distance,
            "excluded_histories": self.excluded_histories,
            "warnings": self.warnings,
        }


def _encode(sequence, alphabet):
    if isinstance(sequence, SymbolSequence):
        sequence = sequence.symbols
    if isinstance(sequence, str):
        chars = [c for c in sequence if not c.isspace()]
        if alphabet is None:
            alphabet = sorted(set(chars))
        index = {a: i for i, a in enumerate(alphabet)}
        try:
            x = np.array([index[c] for c in chars], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"symbol {exc.args[0]!r} not in alphabet") from None
        return x, list(alphabet)
    x = np.asarray(sequence, dtype=np.int64)
    if alphabet is None:
        alphabet = [str(i) for i in range(int(x.max()) + 1)] if x.size else []
    if x.size and (x.min() < 0 or x.max() >= len(alphabet)):
        raise ValueError("symbol index outside the alphabet")
    return x, list(alphabet)


def _window_codes(x, start, length, base):
    """Integer code of ``x[t:t+length]`` for every ``t`` in ``start``, first symbol most significant."""
    code = np.zeros(len(start), dtype=np.int64)
    for i in range(length):
        code = code * base + x[start + i]
    return code


def _restrict_to_recurrent(T, occupancy):
    """Keep the most occupied closed communicating class of the support graph."""
    adj = T.sum(axis=2) > 0
    n = adj.shape[0]
    reach = adj | np.eye(n, dtype=bool)
    for _ in range(n):
        nxt = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
        if (nxt == reach).all():
            break
        reach = nxt
    best = None
    for j in range(n):
        cls = np.flatnonzero(reach[j] & reach[:, j])
        closed = not (reach[cls].any(axis=0) & ~np.isin(np.arange(n), cls)).any()
        if closed and adj[j].any():
            score = occupancy[cls].sum()
            if best is None or score > best[0]:
                best = (score, cls)
    return None if best is None else best[1]


def infer_machine(sequence, config: InferenceConfig = InferenceConfig(), alphabet=None):
    """Infer a machine from ``sequence``.

    Parameters
    ----------
    sequence : str, SymbolSequence or sequence of int
        Observed symbols. Strings are read one character per symbol with
        whitespace ignored; their alphabet defaults to the sorted distinct
        characters.
    config : InferenceConfig
    alphabet : list of str, optional
        Symbol labels, overriding the default.

    Returns
    -------
    machine : EpsilonMachine
        States are named ``C0, C1, ...`` in order of cluster creation.
    diagnostics : InferenceDiagnostics

    Raises
    ------
    ValueError
        For an empty sequence or when no history reaches ``min_count``.
    EnumerationBudgetExceeded
        When ``|Sigma|**(L+F)`` exceeds the count-table budget.
    """
    x, alphabet = _encode(sequence, alphabet)
    if x.size == 0:
        raise ValueError("cannot infer a machine from an empty sequence")
    L, F = config.history_length, config.future_length
    m = len(alphabet)
    n_hist, n_fut = m**L, m**F
    if n_hist * n_fut > ENUMERATION_BUDGET:
        raise EnumerationBudgetExceeded(f"|Sigma|^(L+F) = {n_hist * n_fut} exceeds {ENUMERATION_BUDGET}")
    notes = []
    if x.size < n_hist * n_fut * config.min_count:
        notes.append(f"sequence length {x.size} is small relative to |Sigma|^(L+F) * min_count "
                     f"= {n_hist * n_fut * config.min_count}")
        warnings.warn(notes[-1], stacklevel=2)
    if x.size < L + F:
        raise ValueError(f"sequence shorter than L + F = {L + F}")

    t = np.arange(L, x.size - F + 1)
    h = _window_codes(x, t - L, L, m)
    f = _window_codes(x, t, F, m)
    counts = np.bincount(h * n_fut + f, minlength=n_hist * n_fut).reshape(n_hist, n_fut)
    totals = counts.sum(axis=1)
    included = np.flatnonzero(totals >= config.min_count)
    if included.size == 0:
        raise ValueError(f"no history of length {L} occurs at least {config.min_count} times")
    dist = counts / np.maximum(totals, 1)[:, None]

    # greedy clustering in lexicographic history order
    cluster_of = np.full(n_hist, -1)
    reps = []
    within = 0.0
    for hist in included:
        for c, rep in enumerate(reps):
            d = np.abs(dist[hist] - dist[rep]).sum()
            if d <= config.merge_tolerance:
                cluster_of[hist] = c
                within = max(within, d)
                break
        else:
            cluster_of[hist] = len(reps)
            reps.append(hist)
    between = None
    if len(reps) > 1:
        between = min(float(np.abs(dist[a] - dist[b]).sum())
                      for i, a in enumerate(reps) for b in reps[i + 1:])

    # transitions: history ending at t-1, symbol x[t], history ending at t
    t = np.arange(L, x.size)
    h_from = _window_codes(x, t - L, L, m)
    h_to = _window_codes(x, t - L + 1, L, m)
    c_from, c_to = cluster_of[h_from], cluster_of[h_to]
    ok = (c_from >= 0) & (c_to >= 0)
    k = len(reps)
    flat = (c_from[ok] * m + x[t][ok]) * k + c_to[ok]
    T = np.bincount(flat, minlength=k * m * k).reshape(k, m, k).transpose(0, 2, 1).astype(float)

    repairs = []
    for j in range(k):
        for r in range(m):
            targets = np.flatnonzero(T[j, :, r])
            if len(targets) > 1:
                keep = targets[np.argmax(T[j, targets, r])]
                moved = {int(c): int(T[j, c, r]) for c in targets}
                T[j, keep, r] = T[j, targets, r].sum()
                T[j, np.setdiff1d(targets, [keep]), r] = 0.0
                repairs.append({"kind": "unifilarity", "cluster": j, "symbol": alphabet[r],
                                "successor_counts": moved, "kept": int(keep)})
                log.info("unifilarity repair at cluster %d, symbol %r", j, alphabet[r])

    occupancy = np.bincount(cluster_of[included], weights=totals[included], minlength=k)
    keep_states = np.arange(k)
    if any(v.kind == "ergodicity" for v in validate(EpsilonMachine(alphabet, _normalized(T)))):
        cls = _restrict_to_recurrent(T, occupancy)
        if cls is None:
            raise ValueError("inferred transition graph has no recurrent class")
        dropped = np.setdiff1d(np.arange(k), cls).tolist()
        repairs.append({"kind": "ergodicity", "dropped_clusters": dropped})
        log.info("restricted inferred machine to recurrent clusters %s", cls.tolist())
        T = T[np.ix_(cls, cls, np.arange(m))]
        keep_states = cls

    machine = EpsilonMachine(alphabet, _normalized(T), [f"C{c}" for c in keep_states])
    members = [[_label(hist, L, m, alphabet) for hist in included if cluster_of[hist] == c]
               for c in range(k)]
    diag = InferenceDiagnostics(
        n_clusters=k,
        occupancy=[int(v) for v in occupancy],
        members=members,
        repairs=repairs,
        max_within_distance=float(within),
        min_between_distance=between,
        excluded_histories=int(n_hist - included.size),
        warnings=notes,
    )
    return machine, diag


def _normalized(T):
    s = T.sum(axis=(1, 2), keepdims=True)
    return np.divide(T, s, out=np.zeros_like(T), where=s > 0)


def _label(code, length, base, alphabet):
    out = []
    for _ in range(length):
        code, r = divmod(int(code), base)
        out.append(alphabet[r])
    sep = "" if all(len(a) == 1 for a in alphabet) else " "
    return sep.join(reversed(out))
