"""Cyclic Jacobi eigensolver for real symmetric matrices, and spectral entropy."""
from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError, NumericalError
from .machine import shannon_entropy

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
EIGEN_CLIP_TOL = 1e-10


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps over all ``(p, q)`` pairs with ``p < q`` in row order, zeroing each
    off-diagonal entry with a plane rotation, until the Frobenius norm of the
    off-diagonal part is below ``tol``.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Symmetric input; it is copied, never modified.
    tol : float
        Convergence threshold on the off-diagonal Frobenius norm.
    max_sweeps : int
        Sweep cap.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
        Ascending.
    eigenvectors : ndarray, shape (n, n)
        Orthonormal columns matching ``eigenvalues``.

    Raises
    ------
    ConvergenceError
        If the sweep cap is reached first.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, atol=1e-12, rtol=0):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)

    for _ in range(max_sweeps + 1):
        if _off_norm(a) < tol:
            order = np.argsort(np.diag(a), kind="stable")
            return np.diag(a)[order].copy(), v[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q]
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def jacobi_eigvalsh(a, **kwargs) -> np.ndarray:
    return jacobi_eigh(a, **kwargs)[0]


def clip_spectrum(eigenvalues, tol: float = EIGEN_CLIP_TOL) -> np.ndarray:
    """Zero eigenvalues in ``[-tol, 0)``; anything more negative is an error."""
    ev = np.asarray(eigenvalues, dtype=float)
    if np.any(ev < -tol):
        raise NumericalError(f"matrix is not positive semidefinite: min eigenvalue {ev.min():.3e}")
    return np.where(ev < 0, 0.0, ev)


def von_neumann_entropy(rho) -> float:
    """Entropy in bits of a real symmetric density matrix."""
    return shannon_entropy(clip_spectrum(jacobi_eigvalsh(rho)))
