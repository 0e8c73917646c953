"""Dense linear-algebra kernels: singular values, exterior powers, and
the two singular-value functions.

All magnitudes travel as natural logarithms; linear-scale matrices only
exist at the d x d (or D x D wedge) kernel level.
"""

from __future__ import annotations

from itertools import combinations
from math import comb, floor

import numpy as np

#: invertibility threshold: |det M| must exceed this times (max |entry|)^d
DET_RTOL = 1e-12


def check_finite(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if not np.isfinite(M).all():
        raise ValueError("matrix has non-finite entries")
    return M


def is_invertible(M: np.ndarray) -> bool:
    M = check_finite(M)
    scale = float(np.abs(M).max())
    if scale == 0.0:
        return False
    return abs(float(np.linalg.det(M / scale))) > DET_RTOL


def log_singular_values(M: np.ndarray) -> np.ndarray:
    """Logs of the singular values of M, sorted non-increasing."""
    M = check_finite(M)
    s = np.linalg.svd(M, compute_uv=False)
    with np.errstate(divide="ignore"):
        return np.log(s)


def log_spectral_norm(M: np.ndarray) -> float:
    """log of the operator (spectral) norm."""
    return float(log_singular_values(M)[0])


def wedge(M: np.ndarray, t: int) -> np.ndarray:
    """Degree-t exterior power of M: the C(d,t) x C(d,t) matrix of t x t
    minors, rows and columns indexed by lexicographically ordered
    t-subsets of {1,...,d}.
    """
    M = check_finite(M)
    d = M.shape[0]
    if not 1 <= t <= d:
        raise ValueError(f"wedge degree {t} outside 1..{d}")
    if t == 1:
        return M.copy()
    subsets = list(combinations(range(d), t))
    D = comb(d, t)
    W = np.empty((D, D))
    for a, rows in enumerate(subsets):
        sub = M[np.ix_(rows, range(d))]
        for b, cols in enumerate(subsets):
            W[a, b] = np.linalg.det(sub[:, cols])
    return W


def psi_q_log(log_sv: np.ndarray, q: np.ndarray) -> float:
    """log of the generalized singular value function: <q, log sigma>."""
    log_sv = np.asarray(log_sv, dtype=float)
    q = np.asarray(q, dtype=float)
    if log_sv.shape != q.shape:
        raise ValueError(f"length mismatch: {log_sv.shape} vs {q.shape}")
    return float(q @ log_sv)


def phi_s_log(log_sv: np.ndarray, s: float) -> float:
    """log of Falconer's singular value function at exponent s >= 0.

    For m <= s < m+1 this is sum of the top m log singular values plus
    (s - m) times the next one; for s >= d it is (s/d) log|det|.
    """
    log_sv = np.asarray(log_sv, dtype=float)
    d = log_sv.shape[0]
    if s < 0:
        raise ValueError("s must be >= 0")
    if s >= d:
        return float(s / d * log_sv.sum())
    m = floor(s)
    return float(log_sv[:m].sum() + (s - m) * log_sv[m])


def phi_weights(d: int, s: float) -> np.ndarray:
    """The weight vector (1,...,1, s-m, 0,...,0) with m = floor(s);
    above the dimension the potential is (s/d) log|det|, i.e. uniform
    weights s/d."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s >= d:
        return np.full(d, s / d)
    q = np.zeros(d)
    m = floor(s)
    q[:m] = 1.0
    if m < d:
        q[m] = s - m
    return q


def equivalence_check(log_sv: np.ndarray, s: float, tol: float = 1e-12) -> bool:
    """phi^s agrees with psi^q for the matching weight vector."""
    log_sv = np.asarray(log_sv, dtype=float)
    q = phi_weights(log_sv.shape[0], s)
    return abs(phi_s_log(log_sv, s) - psi_q_log(log_sv, q)) <= tol
