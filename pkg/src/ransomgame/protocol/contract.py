"""Escrow contract state machine on a simulated ledger clock.

Pure transitions: ``contract_apply`` maps (state, action) to a new state
plus typed events, never mutating its input.  Token amounts are exact
integers so conservation is checkable with equality.  Illegal actions are
refused with an event and leave the state unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

DEPLOYED = "DEPLOYED"
FUNDED = "FUNDED"
KEY_VERIFIED = "KEY_VERIFIED"
COMPLETE = "COMPLETE"
REFUNDED = "REFUNDED"
CANCELLED = "CANCELLED"

TERMINAL_PHASES = (COMPLETE, REFUNDED, CANCELLED)


@dataclass(frozen=True)
class Deploy:
    vk: int
    schedule: tuple[tuple[int, int], ...]  # (amount, unlock height) per round
    timelock_height: int
    attacker_account: str = "attacker"
    victim_account: str = "victim"


@dataclass(frozen=True)
class Deposit:
    victim: str
    amount: int


@dataclass(frozen=True)
class RevealKey:
    sk: int


@dataclass(frozen=True)
class Withdraw:
    round_index: int  # 1-based


@dataclass(frozen=True)
class Cancel:
    victim: str


@dataclass(frozen=True)
class AdvanceClock:
    blocks: int


@dataclass(frozen=True)
class ExpireRefund:
    pass


@dataclass(frozen=True)
class Event:
    kind: str
    detail: dict


@dataclass(frozen=True)
class ContractState:
    phase: str
    vk: int
    attacker_account: str
    victim_account: str
    schedule: tuple[tuple[int, int], ...]
    timelock_height: int
    height: int = 0
    escrow_balance: int = 0
    attacker_withdrawn: int = 0
    victim_refunded: int = 0
    withdrawn_rounds: frozenset[int] = frozenset()
    total_deposited: int = 0
    revealed_sk: int | None = None

    def total_scheduled(self) -> int:
        return sum(a for a, _ in self.schedule)

    def conserved(self) -> bool:
        return (
            self.escrow_balance + self.attacker_withdrawn + self.victim_refunded
            == self.total_deposited
        )


def _refuse(state: ContractState, action, reason: str):
    event = Event("refused", {"action": type(action).__name__, "reason": reason})
    return state, [event]


def contract_apply(state: ContractState | None, action):
    """Apply one action; returns (new state, events).

    Deploy creates the contract from nothing; every other action needs an
    existing state.  Withdrawals require a verified key and an expired
    round unlock; missing the reveal deadline hands the whole deposit back.
    """
    if state is None:
        if not isinstance(action, Deploy):
            raise ValueError("only Deploy can create a contract")
        if not action.schedule or any(a <= 0 for a, _ in action.schedule):
            raise ValueError("schedule must be non-empty with positive amounts")
        new = ContractState(
            phase=DEPLOYED,
            vk=action.vk,
            attacker_account=action.attacker_account,
            victim_account=action.victim_account,
            schedule=tuple(action.schedule),
            timelock_height=action.timelock_height,
        )
        return new, [Event("deployed", {"rounds": len(action.schedule),
                                        "timelock_height": action.timelock_height})]

    if isinstance(action, Deploy):
        return _refuse(state, action, "contract already deployed")

    if isinstance(action, AdvanceClock):
        if action.blocks < 0:
            return _refuse(state, action, "clock cannot go backwards")
        new = replace(state, height=state.height + action.blocks)
        return new, [Event("clock", {"height": new.height})]

    if isinstance(action, Deposit):
        if state.phase != DEPLOYED:
            return _refuse(state, action, f"deposit invalid in phase {state.phase}")
        if action.victim != state.victim_account:
            return _refuse(state, action, "deposit from unknown account")
        if action.amount != state.total_scheduled():
            return _refuse(
                state, action,
                f"deposit {action.amount} must equal scheduled total "
                f"{state.total_scheduled()}",
            )
        new = replace(
            state, phase=FUNDED,
            escrow_balance=state.escrow_balance + action.amount,
            total_deposited=state.total_deposited + action.amount,
        )
        return new, [Event("funded", {"amount": action.amount})]

    if isinstance(action, RevealKey):
        if state.phase != FUNDED:
            return _refuse(state, action, f"reveal invalid in phase {state.phase}")
        if state.height >= state.timelock_height:
            return _refuse(state, action, "timelock expired")
        from .group import G, P, Q  # the baked group; h plays no role for keys

        if not 1 <= action.sk < Q or pow(G, action.sk, P) != state.vk:
            return _refuse(state, action, "key does not match vk")
        new = replace(state, phase=KEY_VERIFIED, revealed_sk=action.sk)
        return new, [Event("key_verified", {})]

    if isinstance(action, Withdraw):
        if state.phase != KEY_VERIFIED:
            return _refuse(state, action, f"withdraw invalid in phase {state.phase}")
        idx = action.round_index
        if not 1 <= idx <= len(state.schedule):
            return _refuse(state, action, f"no scheduled round {idx}")
        if idx in state.withdrawn_rounds:
            return _refuse(state, action, f"round {idx} already withdrawn")
        amount, unlock = state.schedule[idx - 1]
        if state.height < unlock:
            return _refuse(
                state, action, f"round {idx} unlocks at height {unlock}"
            )
        withdrawn = state.withdrawn_rounds | {idx}
        new = replace(
            state,
            escrow_balance=state.escrow_balance - amount,
            attacker_withdrawn=state.attacker_withdrawn + amount,
            withdrawn_rounds=frozenset(withdrawn),
        )
        events = [Event("withdrawn", {"round": idx, "amount": amount})]
        if len(withdrawn) == len(state.schedule):
            new = replace(new, phase=COMPLETE)
            events.append(Event("complete", {}))
        return new, events

    if isinstance(action, Cancel):
        if state.phase != KEY_VERIFIED:
            return _refuse(state, action, f"cancel invalid in phase {state.phase}")
        if action.victim != state.victim_account:
            return _refuse(state, action, "cancel from unknown account")
        refund = state.escrow_balance
        new = replace(
            state, phase=CANCELLED, escrow_balance=0,
            victim_refunded=state.victim_refunded + refund,
        )
        return new, [Event("cancelled", {"refund": refund})]

    if isinstance(action, ExpireRefund):
        if state.phase != FUNDED:
            return _refuse(state, action, f"refund invalid in phase {state.phase}")
        if state.height < state.timelock_height:
            return _refuse(state, action, "timelock has not expired")
        refund = state.escrow_balance
        new = replace(
            state, phase=REFUNDED, escrow_balance=0,
            victim_refunded=state.victim_refunded + refund,
        )
        return new, [Event("refunded", {"refund": refund})]

    return _refuse(state, action, f"unknown action {type(action).__name__}")
