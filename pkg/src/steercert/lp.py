"""Self-contained dense simplex for L1 equality-feasibility problems.

Solves   min sum(s+ + s-)  s.t.  A x + s+ - s- = b,  x, s+, s- >= 0,
which is the phase-one problem whose optimum is the L1 residual of
A x = b over the nonnegative orthant. Slack columns are handled
implicitly, so only A is stored densely.

Pricing is Dantzig by default; when the objective stalls the rule
switches to Bland until strict progress resumes, which rules out
cycling. Everything is deterministic for identical input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LpResult", "l1_feasibility"]

_PIVOT_TOL = 1e-9
_RATIO_TOL = 1e-11
_STALL_LIMIT = 64


@dataclass(frozen=True)
class LpResult:
    residual: float
    x: np.ndarray
    iterations: int


def _column(a_mat: np.ndarray, j: int, n: int, m: int) -> np.ndarray:
    if j < n:
        return a_mat[:, j]
    col = np.zeros(m)
    if j < n + m:
        col[j - n] = 1.0
    else:
        col[j - n - m] = -1.0
    return col


def l1_feasibility(a_mat: np.ndarray, b_vec: np.ndarray, *, max_iter: int = 50_000) -> LpResult:
    """Minimize the L1 violation of A x = b over x >= 0.

    Returns the optimal residual, the minimizing x, and the pivot count.
    Raises RuntimeError when the iteration cap is exceeded.
    """
    a_mat = np.ascontiguousarray(a_mat, dtype=float)
    b_vec = np.asarray(b_vec, dtype=float).reshape(-1)
    m, n = a_mat.shape
    if b_vec.shape != (m,):
        raise ValueError("b has the wrong length")

    # initial basis: one signed slack per row, making x_B = |b| feasible
    basis = np.array([n + i if b_vec[i] >= 0 else n + m + i for i in range(m)], dtype=int)
    x_basic = np.abs(b_vec).astype(float)

    def basis_matrix() -> np.ndarray:
        cols = np.empty((m, m))
        for k, j in enumerate(basis):
            cols[:, k] = _column(a_mat, j, n, m)
        return cols

    cost = np.zeros(n + 2 * m)
    cost[n:] = 1.0

    bland = False
    stall = 0
    prev_obj = float(cost[basis] @ x_basic)
    iterations = 0

    while True:
        if iterations >= max_iter:
            raise RuntimeError("simplex iteration cap exceeded")
        b_mat = basis_matrix()
        y = np.linalg.solve(b_mat.T, cost[basis])
        # reduced costs; slack columns priced analytically
        red_x = -(y @ a_mat)
        red_sp = 1.0 - y
        red_sm = 1.0 + y
        if bland:
            enter = -1
            for group, offset in ((red_x, 0), (red_sp, n), (red_sm, n + m)):
                idx = np.nonzero(group < -_PIVOT_TOL)[0]
                if idx.size:
                    cand = offset + int(idx[0])
                    if enter < 0 or cand < enter:
                        enter = cand
            if enter < 0:
                break
        else:
            mins = [
                (float(red_x.min(initial=0.0)), int(red_x.argmin()) if n else 0, 0),
                (float(red_sp.min()), int(red_sp.argmin()), n),
                (float(red_sm.min()), int(red_sm.argmin()), n + m),
            ]
            best = min(mins, key=lambda t: t[0])
            if best[0] >= -_PIVOT_TOL:
                break
            enter = best[2] + best[1]

        direction = np.linalg.solve(b_mat, _column(a_mat, enter, n, m))
        movable = direction > _RATIO_TOL
        if not movable.any():
            raise RuntimeError("unbounded phase-one problem; input is inconsistent")
        ratios = np.where(movable, x_basic / np.where(movable, direction, 1.0), np.inf)
        best_ratio = ratios.min()
        ties = np.nonzero(ratios <= best_ratio * (1 + 1e-12) + 1e-300)[0]
        if bland or ties.size > 1:
            leave = int(ties[np.argmin(basis[ties])])
        else:
            leave = int(ties[0])

        step = x_basic[leave] / direction[leave]
        x_basic = x_basic - step * direction
        x_basic[leave] = step
        x_basic = np.maximum(x_basic, 0.0)
        basis[leave] = enter
        iterations += 1

        obj = float(cost[basis] @ x_basic)
        if obj < prev_obj - 1e-15 * (1.0 + abs(prev_obj)):
            bland = False
            stall = 0
        else:
            stall += 1
            if stall >= _STALL_LIMIT:
                bland = True
        prev_obj = obj

    x = np.zeros(n + 2 * m)
    x[basis] = x_basic
    x_main = x[:n]
    residual = float(np.abs(a_mat @ x_main - b_vec).sum())
    return LpResult(residual=residual, x=x_main, iterations=iterations)
