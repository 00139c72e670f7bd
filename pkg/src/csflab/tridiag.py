"""Tridiagonal and cyclic tridiagonal linear solvers."""

import numpy as np
from scipy.linalg import solve_banded

__all__ = ["solve_tridiagonal", "solve_cyclic_tridiagonal", "cyclic_matrix"]


def solve_tridiagonal(lower, diag, upper, rhs):
    """Solve a (non-cyclic) tridiagonal system.

    Parameters
    ----------
    lower, diag, upper : ndarray, shape (n,)
        Row ``i`` reads ``lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]``;
        ``lower[0]`` and ``upper[-1]`` are ignored.
    rhs : ndarray, shape (n,) or (n, k)
    """
    ab = np.empty((3, diag.shape[0]))
    ab[0, 1:] = upper[:-1]
    ab[0, 0] = 0.0
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    ab[2, -1] = 0.0
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def solve_cyclic_tridiagonal(lower, diag, upper, rhs):
    """Solve a periodic tridiagonal system by Sherman-Morrison.

    Row ``i`` reads ``lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`` with
    indices taken mod ``n``, so ``lower[0]`` couples to ``x[n-1]`` and
    ``upper[n-1]`` couples to ``x[0]``.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = diag.shape[0]
    if n < 3:
        raise ValueError("cyclic system needs n >= 3")

    alpha = upper[-1]  # A[n-1, 0]
    beta = lower[0]  # A[0, n-1]
    gamma = -diag[0]
    d = diag.copy()
    d[0] -= gamma
    d[-1] -= alpha * beta / gamma

    u = np.zeros(n)
    u[0] = gamma
    u[-1] = alpha
    both = rhs.reshape(n, -1)
    sol = solve_tridiagonal(lower, d, upper, np.column_stack([both, u]))
    y, z = sol[:, :-1], sol[:, -1]
    factor = (y[0] + beta * y[-1] / gamma) / (1.0 + z[0] + beta * z[-1] / gamma)
    x = y - np.outer(z, factor)
    return x.reshape(rhs.shape)


def cyclic_matrix(lower, diag, upper):
    """Dense matrix of the cyclic system (for checking)."""
    n = diag.shape[0]
    a = np.diag(diag).astype(float)
    idx = np.arange(n)
    a[idx, (idx - 1) % n] += lower
    a[idx, (idx + 1) % n] += upper
    return a
