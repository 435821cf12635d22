"""Matrix norms used for inequality checks."""
from __future__ import annotations

import numpy as np

POWER_ITERATIONS = 50
POWER_TOL = 1e-10


def spectral_norm(A, iterations: int = POWER_ITERATIONS, tol: float = POWER_TOL) -> float:
    """Largest singular value of A by power iteration on A^T A.

    The start vector is fixed, so the estimate is deterministic.  Power
    iteration approaches the true norm from below; the Frobenius norm is an
    upper bound and the estimate is clipped to it.
    """
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    fro = float(np.linalg.norm(A))
    if fro == 0.0:
        return 0.0
    n = A.shape[1]
    v = np.random.default_rng(0x5EED).standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iterations):
        w = A.T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            break
        v = w / nw
        new = float(np.linalg.norm(A @ v))
        if abs(new - est) <= tol * max(new, 1.0):
            est = new
            break
        est = new
    return min(est, fro)


def frobenius_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A, dtype=float)))
