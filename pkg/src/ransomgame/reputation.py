"""Optimal attacker reputation via a family of linear programs.

One program per case "the victim pays the first i rounds": decision
variables are the substituted coordinates x_1 = beta_r,
x_{j+1} = beta_r * prod_{s<=j}(1 - beta_s), which make both the expected
profit and the pay/abort conditions linear.  Constraint rows are generated
from the outcome-tree expansion; ``lp_crosscheck_report`` diffs them
against an alternative published-style expansion kept for reference.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import PAY_ALL, GameInstance, Reputation, VictimPolicy
from .lp import OPTIMAL, LinearProgram, LpSolution, solve_lp
from .strategy import attacker_expected_profit, victim_policy

log = logging.getLogger("ransomgame.reputation")


def default_epsilon_margin(inst: GameInstance) -> float:
    """Margin used to close the strict pay conditions: 1e-6 of the money scale."""
    return 1e-6 * max(inst.data_value, inst.total_ransom())


def _case_coefficients(inst: GameInstance, case_i: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Objective, constraint matrix and strict-side rhs for case ``case_i``.

    Variables are x_1..x_{i+1}.  Row j (game round j) states that paying
    round j strictly beats aborting there, given aborting at round i+1
    (case i = n means paying through the final round).
    """
    n = inst.n
    R, L, A = inst.ransoms, inst.losses, inst.sale_profits
    m = case_i + 1

    obj = np.zeros(m)
    obj[0] = -inst.recovery_cost
    for l in range(2, case_i + 1):
        obj[l - 1] = R[l - 1] + A[l - 1] - A[l - 2]
    if case_i < n:
        obj[m - 1] = A[case_i] - A[case_i - 1]
    else:
        obj[m - 1] = -A[n - 1]

    # trailing coefficient shared by every row: the abort-round leak term
    tail = (L[case_i] - L[case_i - 1]) if case_i < n else -L[n - 1]

    rows = np.zeros((case_i, m))
    rhs = np.zeros(case_i)
    for j in range(1, case_i + 1):
        row = rows[j - 1]
        if j == 1:
            row[0] = -inst.data_value
            rhs[0] = -R[0]
        else:
            row[j - 1] = R[j - 1]
        for mm in range(j + 1, case_i + 1):
            row[mm - 1] = R[mm - 1] + L[mm - 1] - L[mm - 2]
        row[m - 1] += tail
    return obj, rows, rhs


def build_lp(
    inst: GameInstance, case_i: int, epsilon_margin: float | None = None
) -> LinearProgram:
    """Program whose optimum is the best reputation inducing ``case_i`` paid rounds."""
    inst.require_valid()
    if not 1 <= case_i <= inst.n:
        raise ValueError(f"case {case_i} outside 1..{inst.n}")
    eps = default_epsilon_margin(inst) if epsilon_margin is None else epsilon_margin
    obj, game_rows, game_rhs = _case_coefficients(inst, case_i)
    m = case_i + 1

    rows = [game_rows]
    rhs = [game_rhs - eps]
    labels = [f"pay_round_{j}" for j in range(1, case_i + 1)]
    # chain 0 <= x_{j+1} <= x_j <= 1 (lower bounds are implicit x >= 0)
    chain = np.zeros((m - 1, m))
    for j in range(m - 1):
        chain[j, j] = -1.0
        chain[j, j + 1] = 1.0
        labels.append(f"chain_x{j + 2}_le_x{j + 1}")
    top = np.zeros((1, m))
    top[0, 0] = 1.0
    labels.append("x1_le_1")
    rows += [chain, top]
    rhs += [np.zeros(m - 1), np.ones(1)]

    return LinearProgram(
        objective=obj,
        rows=np.vstack(rows),
        rhs=np.concatenate(rhs),
        row_labels=tuple(labels),
        epsilon_margin=eps,
        case_index=case_i,
    )


def reference_case_rows(inst: GameInstance, case_i: int) -> tuple[np.ndarray, np.ndarray]:
    """Alternative published-style constraint expansion, kept for cross-checks.

    Known discrepancies against the tree-consistent rows: the generic
    middle rows negate the abort-round leak term, and the round-1 row of
    the pay-all case flips the sign of both the future-ransom sum and the
    final-round leak term.  The round-1 row of the intermediate cases also
    scrambles its variable indices; it is reproduced literally, reading the
    out-of-range leak index as the full data value.
    """
    n = inst.n
    R, L = inst.ransoms, inst.losses
    V = inst.data_value
    m = case_i + 1
    rows = np.zeros((case_i, m))
    rhs = np.zeros(case_i)

    def leak(idx: int) -> float:
        # L_0 appears only through the scrambled round-1 row
        return V if idx == 0 else L[idx - 1]

    if case_i == n:
        for j in range(2, n + 1):
            row = rows[j - 1]
            row[j - 1] = R[j - 1]
            for mm in range(j + 1, n + 1):
                row[mm - 1] = R[mm - 1] + L[mm - 1] - L[mm - 2]
            row[m - 1] += -L[n - 1]
        r1 = rows[0]
        r1[0] = -V
        for l in range(2, n + 1):
            r1[l - 1] = -(R[l - 1] + L[l - 1] - L[l - 2])
        r1[m - 1] += L[n - 1]
        rhs[0] = -R[0]
        return rows, rhs

    tail = L[case_i] - L[case_i - 1]
    for j in range(2, case_i + 1):
        row = rows[j - 1]
        row[j - 1] = R[j - 1]
        for mm in range(j + 1, case_i + 1):
            row[mm - 1] = R[mm - 1] + L[mm - 1] - L[mm - 2]
        if j >= case_i - 1:
            row[m - 1] += tail
        else:
            row[m - 1] += -tail
    r1 = rows[0]
    r1[0] = -V
    for l in range(1, case_i):
        idx_r = case_i - l
        r1[l - 1] += -(R[idx_r - 1] + leak(idx_r) - leak(idx_r - 1))
    r1[m - 1] += tail
    rhs[0] = -R[0]
    return rows, rhs


def lp_crosscheck_report(inst: GameInstance, epsilon_margin: float | None = None) -> list[dict]:
    """Per-coefficient diff between tree-consistent and reference rows."""
    out = []
    for case_i in range(1, inst.n + 1):
        _, tree_rows, tree_rhs = _case_coefficients(inst, case_i)
        ref_rows, ref_rhs = reference_case_rows(inst, case_i)
        for j in range(case_i):
            for k in range(case_i + 1):
                a, b = tree_rows[j, k], ref_rows[j, k]
                if abs(a - b) > 1e-9 * max(1.0, abs(a), abs(b)):
                    out.append(
                        {
                            "case": case_i,
                            "row": f"pay_round_{j + 1}",
                            "variable": f"x{k + 1}",
                            "tree_coeff": a,
                            "reference_coeff": b,
                        }
                    )
    return out


def recover_reputation(x: np.ndarray, n: int) -> Reputation:
    """Invert the substitution: beta_r = x_1, beta_j = 1 - x_{j+1}/x_j.

    Once some x_j hits zero the later rounds are unreachable and the
    corresponding betas default to 1, as do rounds past the case's
    variables.
    """
    x = np.asarray(x, float)
    for j in range(1, x.shape[0]):
        if x[j] > x[j - 1] + 1e-12 or x[j] < -1e-12:
            raise ValueError(f"chain violation at x{j + 1}: {x[j]} vs {x[j - 1]}")
    beta_r = float(min(max(x[0], 0.0), 1.0))
    betas = [1.0] * n
    for j in range(1, x.shape[0]):
        if x[j - 1] <= 1e-14:
            break
        betas[j - 1] = float(min(max(1.0 - x[j] / x[j - 1], 0.0), 1.0))
    return Reputation(beta_r, tuple(betas))


def substitute_reputation(rep: Reputation, upto: int | None = None) -> np.ndarray:
    """Forward substitution from a reputation to x-coordinates (inverse of
    ``recover_reputation`` wherever all x_j stay positive)."""
    k = rep.n if upto is None else upto
    x = np.empty(k + 1)
    x[0] = rep.beta_r
    for j in range(1, k + 1):
        x[j] = x[j - 1] * (1.0 - rep.betas[j - 1])
    return x


@dataclass(frozen=True)
class CaseResult:
    case_index: int
    status: str
    lp_value: float
    x: np.ndarray | None
    reputation: Reputation | None
    tree_profit: float | None
    induced_abort_round: int | None
    induced_matches_case: bool | None
    iterations: int


@dataclass(frozen=True)
class OptimalReputationResult:
    reputation: Reputation
    case_index: int | None
    expected_profit: float
    policy: VictimPolicy
    cases: tuple[CaseResult, ...]
    fallback: bool
    epsilon_margin: float

    def to_csv(self) -> str:
        n = max((c.reputation.n for c in self.cases if c.reputation), default=0)
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(
            ["case", "status", "lp_value", "beta_r"]
            + [f"beta_{i}" for i in range(1, n + 1)]
            + ["tree_profit", "induced_abort_round"]
        )
        for c in self.cases:
            betas = list(c.reputation.betas) if c.reputation else [""] * n
            w.writerow(
                [
                    c.case_index,
                    c.status,
                    f"{c.lp_value:.9f}" if np.isfinite(c.lp_value) else "",
                    f"{c.reputation.beta_r:.9f}" if c.reputation else "",
                ]
                + [f"{b:.9f}" if b != "" else "" for b in betas]
                + [
                    f"{c.tree_profit:.9f}" if c.tree_profit is not None else "",
                    "pay_all"
                    if c.induced_abort_round is PAY_ALL and c.status == OPTIMAL
                    else (c.induced_abort_round or ""),
                ]
            )
        return buf.getvalue()


def _canonicalize(lp: LinearProgram, sol: LpSolution) -> LpSolution:
    """Among profit-equal optima prefer the largest key-return probability.

    The objective can be flat in x_1 (recovery cost 0 leaves it without a
    coefficient), so re-solve maximizing x_1 subject to keeping the
    objective within a hair of the found optimum.  A deterministic vertex
    choice keeps sweep outputs stable.
    """
    slack = 1e-9 * (1.0 + abs(sol.value))
    hold = np.vstack([lp.rows, -lp.objective[None, :]])
    rhs = np.concatenate([lp.rhs, [-(sol.value - slack)]])
    second = LinearProgram(
        objective=np.eye(lp.num_vars)[0],
        rows=hold,
        rhs=rhs,
        epsilon_margin=lp.epsilon_margin,
        case_index=lp.case_index,
    )
    refined = solve_lp(second)
    if not refined.optimal:
        return sol
    return LpSolution(
        refined.x,
        float(lp.objective @ refined.x),
        OPTIMAL,
        sol.iterations + refined.iterations,
    )


def optimal_reputation(
    inst: GameInstance, epsilon_margin: float | None = None
) -> OptimalReputationResult:
    """Solve every per-case program, tree-evaluate the recovered candidates,
    and return the most profitable one.

    The worst reputation (sell at once, profit A_1) is always a candidate,
    so the result never falls below the immediate-sale profit.  When no
    pay-inducing case is feasible the result carries ``fallback=True``.
    """
    inst.require_valid()
    eps = default_epsilon_margin(inst) if epsilon_margin is None else epsilon_margin
    n = inst.n
    cases: list[CaseResult] = []
    best_case: CaseResult | None = None

    for case_i in range(1, n + 1):
        lp = build_lp(inst, case_i, eps)
        sol = solve_lp(lp)
        if not sol.optimal:
            cases.append(
                CaseResult(case_i, sol.status, np.nan, None, None, None, None, None,
                           sol.iterations)
            )
            continue
        sol = _canonicalize(lp, sol)
        rep = recover_reputation(sol.x, n)
        policy = victim_policy(inst, rep)
        profit = attacker_expected_profit(inst, rep, policy).expected_profit
        expected_abort = case_i + 1 if case_i < n else PAY_ALL
        matches = policy.abort_round == expected_abort
        if not matches:
            log.warning(
                "case %d induced abort %s instead of %s (eps=%g)",
                case_i, policy.abort_round, expected_abort, eps,
            )
        result = CaseResult(
            case_i, OPTIMAL, sol.value, sol.x, rep, profit,
            policy.abort_round, matches, sol.iterations,
        )
        cases.append(result)
        if best_case is None or profit > best_case.tree_profit:
            best_case = result

    worst = Reputation.worst(n)
    worst_policy = victim_policy(inst, worst)
    worst_profit = attacker_expected_profit(inst, worst, worst_policy).expected_profit

    if best_case is None or best_case.tree_profit <= worst_profit:
        return OptimalReputationResult(
            worst, None, worst_profit, worst_policy, tuple(cases),
            fallback=True, epsilon_margin=eps,
        )
    winner_policy = victim_policy(inst, best_case.reputation)
    return OptimalReputationResult(
        best_case.reputation, best_case.case_index, best_case.tree_profit,
        winner_policy, tuple(cases), fallback=False, epsilon_margin=eps,
    )


@dataclass(frozen=True)
class GridSearchResult:
    reputation: Reputation
    profit: float
    method: str  # "exhaustive" or "heuristic"


def grid_search_reputation(
    inst: GameInstance,
    resolution: float = 0.02,
    seed: int = 0,
    starts: int = 8,
    max_points: int = 200_000_000,
) -> GridSearchResult:
    """Verification oracle: scan the reputation grid for the best profit.

    Full grid for n <= 3 (cost (1/resolution + 1)^(n+1)); larger n falls
    back to coordinate descent from seeded random starts and is labeled
    heuristic.
    """
    inst.require_valid()
    n = inst.n
    K = int(round(1.0 / resolution)) + 1
    R = np.array(inst.ransoms)
    L = np.array(inst.losses)
    A = np.array(inst.sale_profits)
    V, C_r = inst.data_value, inst.recovery_cost

    if n <= 3:
        if K ** (n + 1) > max_points:
            raise ValueError(
                f"grid of {K ** (n + 1)} points exceeds budget {max_points}"
            )
        idx, profit = _kernels.grid_scan(R, L, A, V, C_r, K)
        vec = _kernels.decode_point(idx, n, K)
        return GridSearchResult(
            Reputation(vec[0], tuple(vec[1:])), float(profit), "exhaustive"
        )

    grid = np.linspace(0.0, 1.0, K)
    rng = np.random.default_rng(seed)
    best_vec = None
    best_profit = -np.inf
    corners = [
        np.concatenate([[0.0], np.ones(n)]),
        np.concatenate([[1.0], np.zeros(n)]),
        np.ones(n + 1),
    ]
    start_points = corners + [rng.uniform(0.0, 1.0, n + 1) for _ in range(starts)]
    for vec in start_points:
        vec = vec.copy()
        current = _kernels.profit_at(vec, R, L, A, V, C_r)
        improved = True
        while improved:
            improved = False
            for axis in range(n + 1):
                saved = vec[axis]
                for g in grid:
                    vec[axis] = g
                    p = _kernels.profit_at(vec, R, L, A, V, C_r)
                    if p > current + 1e-12:
                        current, saved = p, g
                        improved = True
                vec[axis] = saved
        if current > best_profit:
            best_profit, best_vec = current, vec.copy()
    return GridSearchResult(
        Reputation(best_vec[0], tuple(best_vec[1:])), float(best_profit), "heuristic"
    )


@dataclass(frozen=True)
class OverchargeBound:
    bound: float
    holds: bool
    optimal_profit: float
    precondition_ok: bool
    violations: tuple[str, ...]


def overcharge_bound(inst: GameInstance, gamma: float) -> OverchargeBound:
    """Profit floor for a first-round demand of (1-gamma)V: the optimizer's
    profit should exceed (1-gamma)V + A_1 - C_r."""
    inst.require_valid()
    violations = []
    if gamma <= 0:
        violations.append("gamma must be positive")
    expected_r1 = (1.0 - gamma) * inst.data_value
    if abs(inst.ransoms[0] - expected_r1) > 1e-9 * max(1.0, expected_r1):
        violations.append(
            f"first-round ransom {inst.ransoms[0]} is not (1-gamma)V = {expected_r1}"
        )
    if inst.n >= 2:
        if expected_r1 + inst.sale_profits[1] <= inst.sale_profits[0]:
            violations.append("(1-gamma)V + A_2 must exceed A_1")
    else:
        violations.append("bound needs at least two rounds")
    bound = expected_r1 + inst.sale_profits[0] - inst.recovery_cost
    profit = optimal_reputation(inst).expected_profit
    return OverchargeBound(
        bound=bound,
        holds=profit > bound,
        optimal_profit=profit,
        precondition_ok=not violations,
        violations=tuple(violations),
    )


@dataclass(frozen=True)
class SingleRoundOptimum:
    beta_r: float
    beta_1: float
    profit: float
    pays: bool


def single_round_optimum(
    R: float, V: float, L1: float, A1: float, C_r: float
) -> SingleRoundOptimum:
    """Best (beta_r, beta_1) for a one-shot demand, or immediate sale.

    Profit R + A1*(1 - beta_r*(1-beta_1)) - beta_r*C_r is maximized on the
    boundary of the pay condition R < beta_r*(V + (1-beta_1)*L1); two
    candidate corners (sell immediately after returning, or never return
    fully) cover the optimum of the linear program in (u, w) = (beta_r,
    beta_r*(1-beta_1)).
    """
    for name, val in (("R", R), ("V", V), ("L1", L1), ("A1", A1), ("C_r", C_r)):
        if val < 0:
            raise ValueError(f"{name} must be non-negative")
    fallback = SingleRoundOptimum(0.0, 1.0, A1, False)
    if R >= V + L1 or R <= 0:
        return fallback
    delta = 1e-9 * max(1.0, V + L1)

    def ep(u: float, w: float) -> float:
        return R + A1 * (1.0 - w) - C_r * u

    candidates = []
    u0 = (R + delta) / V if V > 0 else np.inf
    if u0 <= 1.0:
        candidates.append((u0, 0.0))
    u1 = (R + delta) / (V + L1)
    if u1 <= 1.0:
        candidates.append((u1, u1))
    if L1 > 0:
        w_star = (R + delta - V) / L1  # binding point on the u = 1 face
        if 0.0 <= w_star <= 1.0:
            candidates.append((1.0, w_star))
    candidates += [(1.0, 0.0), (1.0, 1.0)]
    feasible = [
        (u, w)
        for u, w in candidates
        if 0.0 <= w <= u <= 1.0 and V * u + L1 * w > R
    ]
    if not feasible:
        return fallback
    u, w = max(feasible, key=lambda uw: ep(*uw))
    profit = ep(u, w)
    if profit <= A1:
        return fallback
    beta_1 = 1.0 - w / u
    return SingleRoundOptimum(u, beta_1, profit, True)
