"""End-to-end protocol runs against the simulated ledger.

Agents play the nine interaction steps: break-in, verifiable encryption,
contract deployment with the demand and vk, victim-side bundle
verification, deposit, key reveal before the timelock (or withholding),
decryption, and scheduled withdrawals with optional victim cancellation.
Every state change lands in a JSONL-able transcript.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

from .contract import (
    COMPLETE,
    AdvanceClock,
    Cancel,
    ContractState,
    Deploy,
    Deposit,
    ExpireRefund,
    RevealKey,
    Withdraw,
    contract_apply,
)
from .group import setup
from .veck import decrypt, encrypt_with_proof, verify_bundle


@dataclass(frozen=True)
class ProtocolScenario:
    mode: str = "single"  # "single" or "multi"
    rounds: int = 1
    demand: int = 1000
    cancel_at: int | None = None  # cancel after withdrawing this many rounds
    withhold_key: bool = False
    chunk_bits: int = 12
    seed: int = 0
    data: bytes | None = None
    data_size: int = 96
    round_spacing: int = 10  # blocks between round unlocks
    timelock_blocks: int = 5

    def __post_init__(self):
        if self.mode not in ("single", "multi"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "single" and self.rounds != 1:
            raise ValueError("single mode has exactly one round")
        if self.rounds < 1:
            raise ValueError("need at least one round")
        if self.cancel_at is not None and not 0 <= self.cancel_at <= self.rounds:
            raise ValueError("cancel_at outside the schedule")


@dataclass
class Transcript:
    scenario: ProtocolScenario
    entries: list[dict] = field(default_factory=list)
    actions: list = field(default_factory=list)
    final_state: ContractState | None = None
    data_recovered: bool = False
    attacker_gain: int = 0
    victim_spent: int = 0
    victim_refunded: int = 0
    conserved: bool = False

    def log(self, height: int, actor: str, action: str, before: str | None,
            after: str | None, balances: dict) -> None:
        self.entries.append(
            {
                "height": height,
                "actor": actor,
                "action": action,
                "phase_before": before,
                "phase_after": after,
                "balances": dict(balances),
            }
        )

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(e, sort_keys=True) for e in self.entries) + "\n"


def _schedule(scn: ProtocolScenario) -> tuple[tuple[int, int], ...]:
    base = scn.demand // scn.rounds
    amounts = [base] * scn.rounds
    amounts[0] += scn.demand - base * scn.rounds  # remainder rides round 1
    return tuple(
        (amounts[i], (i + 1) * scn.round_spacing) for i in range(scn.rounds)
    )


def run_end_to_end(scn: ProtocolScenario) -> Transcript:
    """Execute the protocol steps against a fresh ledger; never raises on
    contract refusals, they become transcript events."""
    rng = random.Random(scn.seed)
    params = setup(scn.chunk_bits, scn.seed)
    data = scn.data if scn.data is not None else rng.randbytes(scn.data_size)
    tr = Transcript(scenario=scn)

    def balances(state: ContractState | None) -> dict:
        if state is None:
            return {"escrow": 0, "attacker": 0, "victim_refunded": 0}
        return {
            "escrow": state.escrow_balance,
            "attacker": state.attacker_withdrawn,
            "victim_refunded": state.victim_refunded,
        }

    def apply(state: ContractState | None, actor: str, action):
        new, events = contract_apply(state, action)
        tr.actions.append(action)
        after = new.phase if new is not None else None
        before = state.phase if state is not None else None
        label = type(action).__name__
        for ev in events:
            label_ev = f"{label}:{ev.kind}" if ev.kind != label.lower() else label
            tr.log(new.height if new else 0, actor, label_ev, before, after,
                   balances(new))
        return new

    # Step 1: break-in (outside the ledger, recorded for completeness)
    tr.log(0, "attacker", "break_in", None, None, balances(None))

    # Step 2: verifiable encryption on the victim's machine
    sk, bundle = encrypt_with_proof(params, data, rng)
    tr.log(0, "attacker", "encrypt_with_proof", None, None, balances(None))

    # Step 3: deploy with demand, wallet, vk, schedule, timelock
    schedule = _schedule(scn)
    last_unlock = schedule[-1][1]
    timelock = scn.timelock_blocks
    state = apply(None, "attacker", Deploy(bundle.vk, schedule, timelock))

    # Steps 4/5: the victim verifies recoverability before paying
    outcome = verify_bundle(params, bundle)
    tr.log(state.height, "victim", f"verify_cipher_data:{outcome.accepted}",
           state.phase, state.phase, balances(state))
    if not outcome:
        tr.final_state = state
        tr.conserved = state.conserved()
        return tr

    # Step 6: deposit the full scheduled amount
    state = apply(state, "victim", Deposit("victim", scn.demand))
    tr.victim_spent = scn.demand

    # Step 7: reveal before the timelock, or withhold and let it expire
    if scn.withhold_key:
        state = apply(state, "ledger", AdvanceClock(timelock))
        state = apply(state, "victim", ExpireRefund())
    else:
        state = apply(state, "attacker", RevealKey(sk))

        # Step 8: the victim reads sk and recovers the data
        recovered = decrypt(params, state.revealed_sk, bundle.ciphertext,
                            bundle.data_length)
        tr.data_recovered = (
            hashlib.sha256(recovered).digest() == bundle.data_digest
            and recovered == data
        )
        tr.log(state.height, "victim", f"decrypt:{tr.data_recovered}",
               state.phase, state.phase, balances(state))

        # Step 9: withdraw per schedule; the victim may cancel the remainder
        stop_after = scn.cancel_at if scn.cancel_at is not None else scn.rounds
        for i in range(1, scn.rounds + 1):
            if i > stop_after:
                break
            _, unlock = schedule[i - 1]
            if state.height < unlock:
                state = apply(state, "ledger", AdvanceClock(unlock - state.height))
            state = apply(state, "attacker", Withdraw(i))
        if state.phase != COMPLETE and scn.cancel_at is not None:
            state = apply(state, "victim", Cancel("victim"))

    tr.final_state = state
    tr.attacker_gain = state.attacker_withdrawn
    tr.victim_refunded = state.victim_refunded
    tr.conserved = state.conserved()
    return tr


def replay_transcript(tr: Transcript) -> ContractState:
    """Re-apply the recorded action list from genesis; the contract is
    deterministic, so this must land on the identical final state."""
    state: ContractState | None = None
    for action in tr.actions:
        state, _ = contract_apply(state, action)
    return state
