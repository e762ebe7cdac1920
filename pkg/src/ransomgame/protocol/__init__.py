"""Desk-scale simulator of the verifiable-encryption ransom protocol.

Per-chunk exponent encryption with discrete-log-equality proofs stands in
for a production verifiable-encryption scheme; a simulated ledger hosts
the escrow contract with its payment schedule and timelock.
"""

from .group import GroupParams, setup
from .veck import (
    VeckBundle,
    VerifyOutcome,
    decrypt,
    encrypt_with_proof,
    verify_cipher_data,
    verify_key,
)
from .contract import (
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
from .simulate import ProtocolScenario, run_end_to_end, replay_transcript

__all__ = [
    "GroupParams",
    "setup",
    "VeckBundle",
    "VerifyOutcome",
    "encrypt_with_proof",
    "verify_cipher_data",
    "verify_key",
    "decrypt",
    "ContractState",
    "Deploy",
    "Deposit",
    "RevealKey",
    "Withdraw",
    "Cancel",
    "AdvanceClock",
    "ExpireRefund",
    "contract_apply",
    "ProtocolScenario",
    "run_end_to_end",
    "replay_transcript",
]
