"""Dense two-phase simplex for small inequality-form programs.

Maximizes c.x subject to A x <= b and x >= 0, with Bland's anti-cycling
rule and deterministic lowest-index tie-breaking, so repeated solves of
the same program pivot identically on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "OPTIMAL"
INFEASIBLE = "INFEASIBLE"
UNBOUNDED = "UNBOUNDED"

MAX_VARIABLES = 64
_TOL = 1e-9
_MAX_ITER = 20_000


@dataclass(frozen=True)
class LinearProgram:
    """Inequality-form program: maximize objective.x s.t. rows.x <= rhs, x >= 0.

    Strict inequalities are encoded as "<= -epsilon_margin" rows by the
    builder; the margin is recorded here so diagnostics can report it.
    """

    objective: np.ndarray
    rows: np.ndarray
    rhs: np.ndarray
    row_labels: tuple[str, ...] = ()
    epsilon_margin: float = 0.0
    case_index: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "objective", np.asarray(self.objective, float))
        object.__setattr__(self, "rows", np.atleast_2d(np.asarray(self.rows, float)))
        object.__setattr__(self, "rhs", np.asarray(self.rhs, float))
        if self.rows.shape[0] != self.rhs.shape[0]:
            raise ValueError("constraint matrix and rhs disagree on row count")
        if self.rows.shape[1] != self.objective.shape[0]:
            raise ValueError("constraint matrix and objective disagree on columns")

    @property
    def num_vars(self) -> int:
        return int(self.objective.shape[0])

    def residuals(self, x: np.ndarray) -> np.ndarray:
        """rows.x - rhs; feasible points are <= 0 elementwise."""
        return self.rows @ x - self.rhs


@dataclass(frozen=True)
class LpSolution:
    x: np.ndarray
    value: float
    status: str
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _bland_entering(obj_row: np.ndarray, allowed: int) -> int:
    for j in range(allowed):
        if obj_row[j] < -_TOL:
            return j
    return -1


def _bland_leaving(T: np.ndarray, basis: list[int], col: int, m: int) -> int:
    best = -1
    best_ratio = np.inf
    for i in range(m):
        a = T[i, col]
        if a > _TOL:
            ratio = T[i, -1] / a
            if ratio < best_ratio - _TOL or (
                abs(ratio - best_ratio) <= _TOL
                and (best == -1 or basis[i] < basis[best])
            ):
                best = i
                best_ratio = ratio
    return best


def _run_simplex(T: np.ndarray, basis: list[int], allowed: int, m: int) -> tuple[str, int]:
    iters = 0
    while True:
        col = _bland_entering(T[-1], allowed)
        if col < 0:
            return OPTIMAL, iters
        row = _bland_leaving(T, basis, col, m)
        if row < 0:
            return UNBOUNDED, iters
        _pivot(T, basis, row, col)
        iters += 1
        if iters > _MAX_ITER:
            raise RuntimeError("simplex iteration cap exceeded")


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Two-phase simplex solve; deterministic for a fixed input."""
    nv = lp.num_vars
    if nv > MAX_VARIABLES:
        raise ValueError(f"program has {nv} variables, cap is {MAX_VARIABLES}")
    A = lp.rows.copy()
    b = lp.rhs.copy()
    m = A.shape[0]

    flip = b < 0
    A[flip] *= -1.0
    b = np.abs(b)
    n_art = int(flip.sum())

    # columns: structural | one slack/surplus per row | artificials | rhs
    ncols = nv + m + n_art + 1
    T = np.zeros((m + 1, ncols))
    basis: list[int] = [0] * m
    art_cols: list[int] = []
    ai = 0
    for i in range(m):
        T[i, :nv] = A[i]
        T[i, nv + i] = -1.0 if flip[i] else 1.0
        if flip[i]:
            col = nv + m + ai
            T[i, col] = 1.0
            basis[i] = col
            art_cols.append(col)
            ai += 1
        else:
            basis[i] = nv + i
        T[i, -1] = b[i]

    total_iters = 0
    if n_art:
        # phase 1: drive sum of artificials to zero
        for col in art_cols:
            T[-1, col] = 1.0
        for i in range(m):
            if basis[i] in art_cols:
                T[-1] -= T[i]
        status, iters = _run_simplex(T, basis, nv + m + n_art, m)
        total_iters += iters
        if status != OPTIMAL or T[-1, -1] < -_TOL * max(1.0, np.abs(b).max()):
            return LpSolution(np.zeros(nv), np.nan, INFEASIBLE, total_iters)
        # pivot leftover zero-level artificials out of the basis
        for i in range(m):
            if basis[i] in art_cols:
                piv = next(
                    (j for j in range(nv + m) if abs(T[i, j]) > _TOL), None
                )
                if piv is not None:
                    _pivot(T, basis, i, piv)
        keep = [i for i in range(m) if basis[i] not in art_cols]
        T = np.delete(T, [i for i in range(m) if i not in keep], axis=0)[
            :, [j for j in range(ncols) if j not in art_cols]
        ]
        basis = [basis[i] for i in keep]
        m = len(basis)

    # phase 2 objective row: minimize -c.x
    T[-1, :] = 0.0
    T[-1, :nv] = -lp.objective
    for i in range(m):
        if T[-1, basis[i]] != 0.0:
            T[-1] -= T[-1, basis[i]] * T[i]
    status, iters = _run_simplex(T, basis, nv + m if n_art == 0 else T.shape[1] - 1, m)
    total_iters += iters
    if status == UNBOUNDED:
        return LpSolution(np.zeros(nv), np.inf, UNBOUNDED, total_iters)

    x = np.zeros(nv)
    for i in range(m):
        if basis[i] < nv:
            x[basis[i]] = T[i, -1]
    return LpSolution(x, float(lp.objective @ x), OPTIMAL, total_iters)
