"""Quantum causal states, their overlaps, and the quantum statistical complexity.

Each causal state ``S_j`` is encoded as the real unit vector

    |S_j> = sum_{r, k} sqrt(T[j, k, r]) |r>|k>

on a space of dimension ``|Sigma| * N``; basis index ``r * N + k`` stands
for ``|r>|k>``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .info import ExcessEntropyEstimate, excess_entropy
from .irreversibility import IrreversibilityWitness, find_witness
from .linalg import clip_spectrum, jacobi_eigvalsh
from .machine import EpsilonMachine, shannon_entropy, stationary_distribution, statistical_complexity

THEOREM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QuantumCausalStates:
    machine: EpsilonMachine
    amplitudes: np.ndarray  # (N, |Sigma| * N)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[1]

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to ``(N, |Sigma|, N)``, indexed ``[j, r, k]``."""
        n = self.machine.n_states
        return self.amplitudes.reshape(n, self.machine.n_symbols, n)


@dataclass(frozen=True)
class QuantumComplexityReport:
    eigenvalues: np.ndarray
    c_q: float


def build_quantum_states(machine: EpsilonMachine) -> QuantumCausalStates:
    amp = np.sqrt(np.transpose(machine.transitions, (0, 2, 1)))  # [j, r, k]
    amp = amp.reshape(machine.n_states, -1)
    amp.setflags(write=False)
    return QuantumCausalStates(machine, amp)


def gram_matrix(qstates: QuantumCausalStates) -> np.ndarray:
    """Overlaps ``<S_j|S_k> = sum_{r,l} sqrt(T[j,l,r] T[k,l,r])``."""
    a = qstates.amplitudes
    g = a @ a.T
    return 0.5 * (g + g.T)


def weighted_gram(qstates: QuantumCausalStates, stationary) -> np.ndarray:
    """``D[j, k] = sqrt(p_j p_k) <S_j|S_k>``, which has the nonzero spectrum of rho."""
    s = np.sqrt(np.asarray(stationary, dtype=float))
    return s[:, None] * gram_matrix(qstates) * s[None, :]


def density_matrix(qstates: QuantumCausalStates, weights) -> np.ndarray:
    """``rho = sum_j w_j |S_j><S_j|`` on the ``|Sigma| * N`` dimensional space."""
    a = qstates.amplitudes
    return (a.T * np.asarray(weights, dtype=float)) @ a


def quantum_complexity(qstates: QuantumCausalStates, stationary) -> QuantumComplexityReport:
    """Von Neumann entropy (bits) of the stationary mixture of quantum causal states.

    Diagonalizes the N x N matrix ``D`` of :func:`weighted_gram` by Jacobi
    rotations rather than the much larger ``rho``.
    """
    ev = clip_spectrum(jacobi_eigvalsh(weighted_gram(qstates, stationary)))
    return QuantumComplexityReport(ev, shannon_entropy(ev))


@dataclass
class TheoremRecord:
    """Everything ``qem analyze`` reports for one machine."""

    c_mu: float
    e: ExcessEntropyEstimate
    c_q: float
    eigenvalues: np.ndarray
    stationary: np.ndarray
    witness: IrreversibilityWitness | None
    theorem_holds: bool

    def to_dict(self, machine: EpsilonMachine | None = None) -> dict:
        return {
            "c_mu": self.c_mu,
            "e": self.e.value,
            "c_q": self.c_q,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "witness": None if self.witness is None else self.witness.to_dict(machine),
            "theorem_holds": self.theorem_holds,
            "stationary": [float(x) for x in self.stationary],
            "excess_entropy": self.e.to_dict(),
        }


def theorem_check(machine: EpsilonMachine, **e_kwargs) -> TheoremRecord:
    """Compute C_mu, E, C_q and the witness, and test the quantum advantage claim.

    ``theorem_holds`` is True when a witness implies ``C_q < C_mu - 1e-9`` and
    its absence implies ``|C_q - C_mu| < 1e-9``. ``E`` is reported but not
    part of the verdict. Extra keyword arguments go to :func:`excess_entropy`.
    """
    p = stationary_distribution(machine)
    c_mu = statistical_complexity(machine, p)
    e = excess_entropy(machine, p, **e_kwargs)
    q = quantum_complexity(build_quantum_states(machine), p)
    w = find_witness(machine)
    if w is not None:
        holds = q.c_q < c_mu - THEOREM_TOL
    else:
        holds = abs(q.c_q - c_mu) < THEOREM_TOL
    return TheoremRecord(c_mu, e, q.c_q, q.eigenvalues, p, w, bool(holds))
