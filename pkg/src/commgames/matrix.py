"""Value and optimal strategies of finite zero-sum matrix games."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .game import MatrixGame


def _normalize(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def _pure_saddle(A: np.ndarray, tol: float):
    lower = A.min(axis=1)
    upper = A.max(axis=0)
    r = int(np.argmax(lower))
    c = int(np.argmin(upper))
    if upper[c] - lower[r] <= tol:
        p = np.zeros(A.shape[0])
        q = np.zeros(A.shape[1])
        p[r] = 1.0
        q[c] = 1.0
        return float(A[r, c]), p, q
    return None


def solve_2x2(A: np.ndarray):
    """Closed-form solution of a 2x2 game with no pure saddle point."""
    a, b = A[0]
    c, d = A[1]
    den = a - b - c + d
    v = (a * d - b * c) / den
    p = np.array([d - c, a - b]) / den
    q = np.array([d - b, a - c]) / den
    return float(v), _normalize(p), _normalize(q)


def _lp_row(A: np.ndarray):
    # maximize v s.t. p^T A >= v, sum p = 1, p >= 0; shift so the value is positive
    m, n = A.shape
    shift = 1.0 - A.min()
    B = A + shift
    res = linprog(
        c=np.ones(m),
        A_ub=-B.T,
        b_ub=-np.ones(n),
        bounds=[(0, None)] * m,
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    s = res.x.sum()
    return 1.0 / s - shift, _normalize(res.x)


def matrix_value(M, tol: float = 1e-9) -> tuple[float, np.ndarray, np.ndarray]:
    """Minimax value of ``M`` (row player maximizes) and an optimal pair.

    Degenerate shapes and pure saddle points are handled directly, 2x2
    games in closed form, and everything else by a pair of linear programs.
    """
    A = M.entries if isinstance(M, MatrixGame) else MatrixGame(M).entries
    m, n = A.shape
    if m == 1:
        c = int(np.argmin(A[0]))
        q = np.zeros(n)
        q[c] = 1.0
        return float(A[0, c]), np.ones(1), q
    if n == 1:
        r = int(np.argmax(A[:, 0]))
        p = np.zeros(m)
        p[r] = 1.0
        return float(A[r, 0]), p, np.ones(1)
    hit = _pure_saddle(A, tol)
    if hit is not None:
        return hit
    if (m, n) == (2, 2):
        return solve_2x2(A)
    v, p = _lp_row(A)
    w, q = _lp_row(-A.T)
    # the two programs agree up to solver tolerance; average them
    v = 0.5 * (v - w)
    v = float(min(max(v, A.min()), A.max()))
    return v, p, q


def matrix_values_batch(A: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Values of a stack of matrix games ``A[s]``, vectorized where possible."""
    S, m, n = A.shape
    if m == 1:
        return A[:, 0, :].min(axis=1)
    if n == 1:
        return A[:, :, 0].max(axis=1)
    lower = A.min(axis=2).max(axis=1)
    upper = A.max(axis=1).min(axis=1)
    out = np.empty(S)
    saddle = upper - lower <= tol
    out[saddle] = lower[saddle]
    rest = np.nonzero(~saddle)[0]
    if rest.size:
        if (m, n) == (2, 2):
            a = A[rest, 0, 0]
            b = A[rest, 0, 1]
            c = A[rest, 1, 0]
            d = A[rest, 1, 1]
            out[rest] = (a * d - b * c) / (a - b - c + d)
        else:
            for s in rest:
                out[s] = matrix_value(A[s], tol)[0]
    return out
