"""Victim best responses and the exact attacker expected-profit evaluator.

The backward recursion computes per-round continuation values; the victim
pays while paying beats tolerating the leak and aborts at the first round
where it does not (ties resolve to abort).  The outcome-tree evaluator is
the canonical attacker objective; ``closed_form_profit`` keeps an
alternative closed-form expansion around purely for cross-checking, since
it disagrees with the tree on some cases (see ``profit_formula_divergence``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    PAY_ALL,
    GameInstance,
    Reputation,
    VictimPolicy,
    check_reputation,
)

#: Hard cap for the brute-force policy enumeration.
ENUMERATION_MAX_ROUNDS = 24


@dataclass(frozen=True)
class OutcomePath:
    """One leaf of the game's probability tree, seen from the attacker."""

    probability: float
    end_round: int
    sold: bool
    key_returned: bool
    ransom_collected: float
    sale_revenue: float
    recovery_cost: float
    rounds_paid: int

    @property
    def profit(self) -> float:
        return self.ransom_collected + self.sale_revenue - self.recovery_cost

    @property
    def victim_loss(self) -> float:
        # Paying R recovers the data worth V only when the key comes back;
        # a sale in round j adds the leak loss L_j on top.
        loss = self.ransom_collected
        if self.key_returned:
            loss -= self._data_value
        if self.sold:
            loss += self._leak_loss
        return loss

    # filled in by outcome_paths; kept off the constructor signature
    _data_value: float = 0.0
    _leak_loss: float = 0.0


@dataclass(frozen=True)
class ProfitBreakdown:
    expected_profit: float
    ransom_component: float
    sale_component: float
    recovery_cost_component: float
    case_probabilities: tuple[tuple[int, bool, float], ...]
    paths: tuple[OutcomePath, ...]


def outcome_paths(
    inst: GameInstance, rep: Reputation, abort_round: int | None
) -> list[OutcomePath]:
    """Enumerate the leaves of the game tree under a threshold policy.

    ``abort_round`` = t means the victim pays rounds 1..t-1 and refuses at
    round t (if the game is still alive there); PAY_ALL pays every round.
    """
    check_reputation(inst, rep)
    n = inst.n
    R, L, A = inst.ransoms, inst.losses, inst.sale_profits
    C_r, V = inst.recovery_cost, inst.data_value
    if abort_round is not PAY_ALL and not 1 <= abort_round <= n:
        raise ValueError(f"abort round {abort_round} outside 1..{n}")

    if abort_round == 1:
        return [
            OutcomePath(1.0, 1, True, False, 0.0, A[0], 0.0, 0,
                        _data_value=V, _leak_loss=L[0])
        ]

    stop = n + 1 if abort_round is PAY_ALL else abort_round
    paths: list[OutcomePath] = []
    # Key withheld: the first payment is kept and the data is sold at once.
    paths.append(
        OutcomePath(1.0 - rep.beta_r, 1, True, False, R[0], A[0], 0.0, 1,
                    _data_value=V, _leak_loss=L[0])
    )
    survive = rep.beta_r  # key returned, confidential so far
    collected = R[0]
    for j in range(1, stop):  # sale decision after round j's payment
        beta = rep.betas[j - 1]
        paths.append(
            OutcomePath(survive * beta, j, True, True, collected, A[j - 1], C_r, j,
                        _data_value=V, _leak_loss=L[j - 1])
        )
        survive *= 1.0 - beta
        if j + 1 < stop:
            collected += R[j]
    if stop <= n:
        # Victim refuses at the abort round; retaliation sale at its value.
        paths.append(
            OutcomePath(survive, stop, True, True, collected, A[stop - 1], C_r,
                        stop - 1, _data_value=V, _leak_loss=L[stop - 1])
        )
    else:
        # Paid through round n and the data was never sold.
        paths.append(
            OutcomePath(survive, n, False, True, collected, 0.0, C_r, n,
                        _data_value=V, _leak_loss=0.0)
        )
    return paths


def attacker_expected_profit(
    inst: GameInstance, rep: Reputation, policy: VictimPolicy | int | None
) -> ProfitBreakdown:
    """Exact expected attacker profit under a threshold victim policy."""
    abort = policy.abort_round if isinstance(policy, VictimPolicy) else policy
    paths = outcome_paths(inst, rep, abort)
    expected = sum(p.probability * p.profit for p in paths)
    ransom = sum(p.probability * p.ransom_collected for p in paths)
    sale = sum(p.probability * p.sale_revenue for p in paths)
    recovery = sum(p.probability * p.recovery_cost for p in paths)
    cases = tuple((p.end_round, p.sold, p.probability) for p in paths)
    return ProfitBreakdown(expected, ransom, sale, recovery, cases, tuple(paths))


def victim_expected_loss(
    inst: GameInstance, rep: Reputation, abort_round: int | None
) -> float:
    """Expected victim loss of a threshold policy, by direct tree evaluation."""
    paths = outcome_paths(inst, rep, abort_round)
    return sum(p.probability * p.victim_loss for p in paths)


def victim_policy(inst: GameInstance, rep: Reputation) -> VictimPolicy:
    """Victim best response against a known reputation, by backward induction.

    Continuation values: b_n = min(R_n + b_n*L_n, L_n), then
    b_i = min(R_i + b_i*L_i + (1-b_i)*b_{i+1}, L_i) down to round 2, and the
    round-1 value folds in the key-return gamble and the recovered data
    value.  The abort round is the first i with b_i = L_i (tie means abort).
    """
    inst.require_valid()
    check_reputation(inst, rep)
    n = inst.n
    R, L = inst.ransoms, inst.losses
    b = [0.0] * n
    abort_flags = [False] * n

    if n >= 2:
        pay = R[n - 1] + rep.betas[n - 1] * L[n - 1]
        b[n - 1] = min(pay, L[n - 1])
        abort_flags[n - 1] = pay >= L[n - 1]
        for i in range(n - 2, 0, -1):
            beta = rep.betas[i]
            pay = R[i] + beta * L[i] + (1.0 - beta) * b[i + 1]
            b[i] = min(pay, L[i])
            abort_flags[i] = pay >= L[i]
        tail = b[1]
    else:
        tail = 0.0
    beta1 = rep.betas[0]
    pay1 = R[0] + (1.0 - rep.beta_r) * L[0] + rep.beta_r * (
        -inst.data_value + beta1 * L[0] + (1.0 - beta1) * tail
    )
    b[0] = min(pay1, L[0])
    abort_flags[0] = pay1 >= L[0]

    abort = next((i + 1 for i, f in enumerate(abort_flags) if f), PAY_ALL)
    return VictimPolicy(abort, tuple(b), b[0])


def perfect_reputation_policy(inst: GameInstance) -> VictimPolicy:
    """Victim best response against an attacker who always returns the key
    and never sells after a payment.

    a_n = min(R_n, L_n); a_i = min(R_i + a_{i+1}, L_i); the round-1 value is
    min(R_1 - V + a_2, L_1).  With n = 1 the continuation term vanishes and
    a_1 = min(R_1 - V, L_1).
    """
    inst.require_valid()
    n = inst.n
    R, L = inst.ransoms, inst.losses
    a = [0.0] * n
    abort_flags = [False] * n
    if n >= 2:
        a[n - 1] = min(R[n - 1], L[n - 1])
        abort_flags[n - 1] = R[n - 1] >= L[n - 1]
        for i in range(n - 2, 0, -1):
            pay = R[i] + a[i + 1]
            a[i] = min(pay, L[i])
            abort_flags[i] = pay >= L[i]
        tail = a[1]
    else:
        tail = 0.0
    pay1 = R[0] - inst.data_value + tail
    a[0] = min(pay1, L[0])
    abort_flags[0] = pay1 >= L[0]
    abort = next((i + 1 for i, f in enumerate(abort_flags) if f), PAY_ALL)
    return VictimPolicy(abort, tuple(a), a[0])


def continuation_policy(
    inst: GameInstance, rep: Reputation, from_round: int
) -> VictimPolicy:
    """Best response for the live subgame starting at ``from_round``.

    From round 2 onward the victim already holds the key, so the recursion
    is the plain tail: pay while R_i + beta_i*L_i + (1-beta_i)*b_{i+1} < L_i.
    ``from_round`` = 1 is the full game.  Continuation values are indexed by
    absolute round; rounds before ``from_round`` are reported as 0.
    """
    inst.require_valid()
    check_reputation(inst, rep)
    if from_round == 1:
        return victim_policy(inst, rep)
    n = inst.n
    if not 2 <= from_round <= n:
        raise ValueError(f"round {from_round} outside 2..{n}")
    R, L = inst.ransoms, inst.losses
    b = [0.0] * n
    abort_flags = [False] * n
    pay = R[n - 1] + rep.betas[n - 1] * L[n - 1]
    b[n - 1] = min(pay, L[n - 1])
    abort_flags[n - 1] = pay >= L[n - 1]
    for i in range(n - 2, from_round - 2, -1):
        beta = rep.betas[i]
        pay = R[i] + beta * L[i] + (1.0 - beta) * b[i + 1]
        b[i] = min(pay, L[i])
        abort_flags[i] = pay >= L[i]
    abort = next(
        (i + 1 for i in range(from_round - 1, n) if abort_flags[i]), PAY_ALL
    )
    return VictimPolicy(abort, tuple(b), b[from_round - 1])


def pay_branch_value(inst: GameInstance, rep: Reputation, round_i: int) -> float:
    """Expected remaining loss of paying at ``round_i`` and playing optimally
    afterwards; compare against L_i (the loss of refusing) to decide."""
    inst.require_valid()
    check_reputation(inst, rep)
    n = inst.n
    if not 1 <= round_i <= n:
        raise ValueError(f"round {round_i} outside 1..{n}")
    R, L = inst.ransoms, inst.losses
    if round_i >= 2:
        beta = rep.betas[round_i - 1]
        if round_i == n:
            return R[n - 1] + beta * L[n - 1]
        tail = continuation_policy(inst, rep, round_i + 1).continuation_values[round_i]
        return R[round_i - 1] + beta * L[round_i - 1] + (1.0 - beta) * tail
    tail = (
        continuation_policy(inst, rep, 2).continuation_values[1] if n >= 2 else 0.0
    )
    beta1 = rep.betas[0]
    return R[0] + (1.0 - rep.beta_r) * L[0] + rep.beta_r * (
        -inst.data_value + beta1 * L[0] + (1.0 - beta1) * tail
    )


def decide_single_round(
    R: float, V: float, L1: float, beta_r: float, beta_1: float
) -> bool:
    """Single-round pay decision: pay iff R < beta_r*(V + (1-beta_1)*L1).

    Equality refuses, consistent with the multi-round tie rule.
    """
    for name, p in (("beta_r", beta_r), ("beta_1", beta_1)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} out of [0,1]: {p}")
    return R < beta_r * (V + (1.0 - beta_1) * L1)


def enumerate_best_response(inst: GameInstance, rep: Reputation) -> VictimPolicy:
    """Brute-force oracle: evaluate every threshold policy by tree expansion.

    Ties resolve to the smallest abort round, with PAY_ALL last.  Refuses
    instances beyond the enumeration budget.
    """
    inst.require_valid()
    check_reputation(inst, rep)
    if inst.n > ENUMERATION_MAX_ROUNDS:
        raise ValueError(
            f"enumeration budget is n <= {ENUMERATION_MAX_ROUNDS}, got {inst.n}"
        )
    candidates: list[int | None] = list(range(1, inst.n + 1)) + [PAY_ALL]
    best: int | None = 1
    best_loss = victim_expected_loss(inst, rep, 1)
    for t in candidates[1:]:
        loss = victim_expected_loss(inst, rep, t)
        if loss < best_loss:
            best, best_loss = t, loss
    values = victim_policy(inst, rep).continuation_values
    return VictimPolicy(best, values, best_loss)


def worst_case_equilibrium(inst: GameInstance):
    """Equilibrium against a zero-credibility attacker.

    The victim never pays, the attacker sells immediately, and the payoffs
    are (A_1, -L_1).  Also returns the per-round 2x2 payoff matrices
    (pay, sell) -> (attacker, victim) used to verify the induction.
    """
    inst.require_valid()
    policy = victim_policy(inst, Reputation.worst(inst.n))
    payoffs = (inst.sale_profits[0], -inst.losses[0])
    matrices = [round_payoff_matrix(inst, i) for i in range(1, inst.n + 1)]
    return policy, "sell_round_1", payoffs, matrices


def round_payoff_matrix(inst: GameInstance, i: int):
    """Round-i payoff table keyed by (pay, sell) with the worst-reputation
    continuation (refuse and sell) filled in for later rounds."""
    if not 1 <= i <= inst.n:
        raise ValueError(f"round {i} outside 1..{inst.n}")
    R, L, A = inst.ransoms, inst.losses, inst.sale_profits
    r, l, a = R[i - 1], L[i - 1], A[i - 1]
    if i < inst.n:
        cont_a, cont_v = A[i], -L[i]
    else:
        cont_a, cont_v = 0.0, 0.0
    return {
        (1, 1): (r + a, -r - l),
        (1, 0): (r + cont_a, -r + cont_v),
        (0, 1): (a, -l),
        (0, 0): (a, -l),
    }


def closed_form_profit(inst: GameInstance, rep: Reputation, rounds_paid: int) -> float:
    """Alternative closed-form expected-profit expansion, kept for cross-checks.

    ``rounds_paid`` = k is the case where the victim pays the first k
    ransoms and refuses the next one (k = n pays every round).  Known
    discrepancies against the tree evaluator: the k < n forms charge the
    recovery cost unconditionally instead of only on the key-return branch,
    run the middle sum to n-2 instead of k-2, and the k = 1 form weights
    the sale-delay term by the key-withholding probability instead of the
    keep-confidential one.  ``profit_formula_divergence`` quantifies this.
    """
    check_reputation(inst, rep)
    n = inst.n
    if not 1 <= rounds_paid <= n:
        raise ValueError(f"rounds_paid {rounds_paid} outside 1..{n}")
    R, A = inst.ransoms, inst.sale_profits
    C_r = inst.recovery_cost
    br = rep.beta_r
    betas = rep.betas

    def keep_prod(upto: int) -> float:
        out = 1.0
        for s in range(upto):
            out *= 1.0 - betas[s]
        return out

    if rounds_paid == 1 and n >= 2:
        return R[0] + A[0] - br * C_r + (1.0 - br) * (A[1] - A[0])

    middle = sum(
        (R[l] + A[l] - A[l - 1]) * keep_prod(l) for l in range(1, n - 1)
    )
    if rounds_paid == n:
        return (
            R[0] + A[0] - br * C_r + br * middle
            + br * keep_prod(n - 1) * (R[n - 1] - A[n - 2])
            + br * keep_prod(n - 1) * betas[n - 1] * A[n - 1]
        )
    k = rounds_paid
    return (
        R[0] + A[0] - C_r + br * middle
        + br * keep_prod(k - 1) * (R[k - 1] + A[k - 1] - A[k - 2])
        + br * (A[k] - A[k - 1]) * keep_prod(k) * betas[n - 1]
    )


def profit_formula_divergence(
    inst: GameInstance, samples: int = 100, seed: int = 0
) -> list[dict]:
    """Diff the closed-form expansion against the tree evaluator.

    Returns one row per (sample, case) with both values and the gap, for
    machine-readable divergence reporting.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for s in range(samples):
        vec = rng.uniform(0.0, 1.0, size=inst.n + 1)
        rep = Reputation(vec[0], tuple(vec[1:]))
        for k in range(1, inst.n + 1):
            abort = k + 1 if k < inst.n else PAY_ALL
            tree = attacker_expected_profit(inst, rep, abort).expected_profit
            closed = closed_form_profit(inst, rep, k)
            rows.append(
                {
                    "sample": s,
                    "rounds_paid": k,
                    "beta_r": vec[0],
                    "tree_profit": tree,
                    "closed_form_profit": closed,
                    "abs_diff": abs(tree - closed),
                }
            )
    return rows
