"""Independent brute-force oracles used only by the tests."""

from itertools import combinations

import numpy as np


def lp_by_vertex_enumeration(c, A, b):
    """Maximize c.x s.t. A x <= b, x >= 0, by enumerating constraint vertices.

    Returns (value, x) or (None, None) when no feasible vertex exists.  Only
    meaningful for bounded feasible regions (include explicit upper bounds).
    """
    c = np.asarray(c, float)
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    nv = c.shape[0]
    rows = np.vstack([A, -np.eye(nv)])
    rhs = np.concatenate([b, np.zeros(nv)])
    best_val, best_x = None, None
    for idx in combinations(range(rows.shape[0]), nv):
        sub = rows[list(idx)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, rhs[list(idx)])
        if np.all(rows @ x <= rhs + 1e-9):
            val = float(c @ x)
            if best_val is None or val > best_val:
                best_val, best_x = val, x
    return best_val, best_x
