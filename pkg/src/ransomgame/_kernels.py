"""Hot numeric kernels for reputation grid scans.

Two interchangeable backends: numba-jitted scalar loops and a chunked
vectorized numpy fallback.  Set RANSOMGAME_NO_NUMBA=1 to force the numpy
path; it is also selected automatically when numba is unavailable.  Both
backends resolve grid ties to the smallest flat index, so the winning
point is backend-independent.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("RANSOMGAME_NO_NUMBA", "").lower() in ("1", "true", "yes")

try:  # pragma: no cover - exercised via the env flag in CI
    if _DISABLE:
        raise ImportError("numba disabled by RANSOMGAME_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


BACKEND = "numba" if HAVE_NUMBA else "numpy"

# Flat index layout for a (n+1)-dimensional grid with K points per axis:
# digit 0 (slowest) is the key-return probability, digits 1..n the per-round
# sale probabilities, each mapping digit d to the value d/(K-1).


@njit(cache=True)
def _profit_at_point(vec, R, L, A, V, C_r):
    """Victim best response plus attacker expected profit at one point."""
    n = R.shape[0]
    br = vec[0]

    # backward recursion for the abort round
    t = n + 1
    b_next = 0.0
    if n >= 2:
        for i in range(n - 1, 0, -1):
            beta = vec[i + 1]
            if i == n - 1:
                pay = R[i] + beta * L[i]
            else:
                pay = R[i] + beta * L[i] + (1.0 - beta) * b_next
            if pay >= L[i]:
                b_next = L[i]
                t = i + 1
            else:
                b_next = pay
        tail = 0.0
        # recompute the true continuation from round 2 (b_next above walked
        # down to round 2 already)
        tail = b_next
    else:
        tail = 0.0
    beta1 = vec[1]
    pay1 = R[0] + (1.0 - br) * L[0] + br * (-V + beta1 * L[0] + (1.0 - beta1) * tail)
    if pay1 >= L[0]:
        t = 1

    if t == 1:
        return A[0]

    profit = (1.0 - br) * (R[0] + A[0])
    surv = br
    collected = R[0]
    for j in range(1, t):
        beta = vec[j]
        profit += surv * beta * (collected + A[j - 1] - C_r)
        surv *= 1.0 - beta
        if j + 1 < t:
            collected += R[j]
    if t <= n:
        profit += surv * (collected + A[t - 1] - C_r)
    else:
        profit += surv * (collected - C_r)
    return profit


@njit(cache=True)
def _grid_scan_numba(R, L, A, V, C_r, K):
    n = R.shape[0]
    dims = n + 1
    total = 1
    for _ in range(dims):
        total *= K
    # divide rather than multiply by a precomputed step: d/(K-1) must produce
    # bit-identical coordinates to the numpy backend, or exact policy ties on
    # the grid resolve differently across backends
    denom = K - 1.0
    vec = np.empty(dims)
    best_idx = -1
    best_profit = -1.0e300
    for flat in range(total):
        rem = flat
        for axis in range(dims - 1, -1, -1):
            vec[axis] = (rem % K) / denom
            rem //= K
        p = _profit_at_point(vec, R, L, A, V, C_r)
        if p > best_profit:
            best_profit = p
            best_idx = flat
    return best_idx, best_profit


def _decode(flat: np.ndarray, dims: int, K: int) -> np.ndarray:
    out = np.empty((flat.shape[0], dims))
    rem = flat.copy()
    for axis in range(dims - 1, -1, -1):
        out[:, axis] = rem % K
        rem //= K
    return out / (K - 1)


def _profit_batch_numpy(B, R, L, A, V, C_r):
    """Vectorized profit over a batch of reputation vectors (rows of B)."""
    n = R.shape[0]
    m = B.shape[0]
    br = B[:, 0]
    betas = B[:, 1:]

    flags = np.zeros((m, n), dtype=bool)
    b = np.empty((m, n))
    if n >= 2:
        pay = R[n - 1] + betas[:, n - 1] * L[n - 1]
        b[:, n - 1] = np.minimum(pay, L[n - 1])
        flags[:, n - 1] = pay >= L[n - 1]
        for i in range(n - 2, 0, -1):
            pay = R[i] + betas[:, i] * L[i] + (1.0 - betas[:, i]) * b[:, i + 1]
            b[:, i] = np.minimum(pay, L[i])
            flags[:, i] = pay >= L[i]
        tail = b[:, 1]
    else:
        tail = np.zeros(m)
    pay1 = R[0] + (1.0 - br) * L[0] + br * (
        -V + betas[:, 0] * L[0] + (1.0 - betas[:, 0]) * tail
    )
    flags[:, 0] = pay1 >= L[0]

    t = np.where(flags.any(axis=1), flags.argmax(axis=1) + 1, n + 1)

    # x[:, j] = beta_r * prod_{s<=j}(1-beta_s); x[:, 0] = beta_r
    x = np.empty((m, n + 1))
    x[:, 0] = br
    np.cumprod(1.0 - betas, axis=1, out=x[:, 1:])
    x[:, 1:] *= br[:, None]
    CR = np.cumsum(R)

    profit = (t >= 2) * (1.0 - br) * (R[0] + A[0])
    for j in range(1, n + 1):
        val = CR[j - 1] + A[j - 1] - C_r
        profit += np.where(j < t, x[:, j - 1] * betas[:, j - 1] * val, 0.0)
    mid = (t >= 2) & (t <= n)
    t_idx = np.clip(t, 2, n)
    x_at = np.take_along_axis(x, (t_idx - 1)[:, None], axis=1)[:, 0]
    abort_val = CR[t_idx - 2] + A[t_idx - 1] - C_r
    profit += np.where(mid, x_at * abort_val, 0.0)
    profit += np.where(t == n + 1, x[:, n] * (CR[n - 1] - C_r), 0.0)
    return np.where(t == 1, A[0], profit)


def _grid_scan_numpy(R, L, A, V, C_r, K, chunk=200_000):
    dims = R.shape[0] + 1
    total = K**dims
    best_idx = -1
    best_profit = -np.inf
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total), dtype=np.int64)
        B = _decode(flat, dims, K)
        profits = _profit_batch_numpy(B, R, L, A, V, C_r)
        local = int(np.argmax(profits))
        if profits[local] > best_profit:
            best_profit = float(profits[local])
            best_idx = int(flat[local])
    return best_idx, best_profit


def grid_scan(R, L, A, V, C_r, K, backend: str | None = None):
    """Scan the full (n+1)-dimensional reputation grid, K points per axis.

    Returns (flat index of the best point, best expected profit).
    """
    R = np.ascontiguousarray(R, dtype=np.float64)
    L = np.ascontiguousarray(L, dtype=np.float64)
    A = np.ascontiguousarray(A, dtype=np.float64)
    use = backend or BACKEND
    if use == "numba" and HAVE_NUMBA:
        return _grid_scan_numba(R, L, A, float(V), float(C_r), K)
    return _grid_scan_numpy(R, L, A, float(V), float(C_r), K)


def decode_point(flat: int, n: int, K: int) -> np.ndarray:
    """Grid coordinates (beta_r, beta_1..beta_n) of a flat index."""
    return _decode(np.array([flat], dtype=np.int64), n + 1, K)[0]


def profit_at(vec, R, L, A, V, C_r) -> float:
    """Scalar evaluation used by the coordinate-descent refiner."""
    vec = np.ascontiguousarray(vec, dtype=np.float64)
    R = np.ascontiguousarray(R, dtype=np.float64)
    L = np.ascontiguousarray(L, dtype=np.float64)
    A = np.ascontiguousarray(A, dtype=np.float64)
    if HAVE_NUMBA:
        return float(_profit_at_point(vec, R, L, A, float(V), float(C_r)))
    return float(_profit_batch_numpy(vec[None, :], R, L, A, float(V), float(C_r))[0])
