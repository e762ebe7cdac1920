"""Prime-order subgroup parameters for the encryption stand-in.

A fixed 256-bit safe prime p = 2q + 1 is baked in; g = 4 generates the
order-q quadratic-residue subgroup and a second generator h is derived
from the setup seed.  Chunk sizes stay small (<= 16 bits) so decryption
can recover chunk values by table lookup.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

# SHA-256("ransomgame-group-v1") walked forward to the first safe prime.
Q = 0xB78232B897CB7AB343AA3E43D5AC0D5A1BABD4CA5C187F0628E68BC4CDBDCF1F
P = 2 * Q + 1
G = 4


@dataclass(frozen=True)
class GroupParams:
    p: int
    q: int
    g: int
    h: int
    chunk_bits: int

    def in_subgroup(self, e: int) -> bool:
        return 1 <= e < self.p and pow(e, self.q, self.p) == 1


def _hash_to_subgroup(label: bytes, p: int) -> int:
    counter = 0
    while True:
        digest = hashlib.sha256(label + counter.to_bytes(4, "big")).digest()
        candidate = int.from_bytes(digest * 2, "big") % p
        h = pow(candidate, 2, p)  # squaring lands in the QR subgroup
        if h not in (0, 1, G):
            return h
        counter += 1


def setup(chunk_bits: int, rng_seed: int) -> GroupParams:
    """Deterministic parameters for a fixed seed; group checks hold by
    construction and are re-assertable via ``in_subgroup``."""
    if not 4 <= chunk_bits <= 16:
        raise ValueError(f"chunk_bits must be in [4, 16], got {chunk_bits}")
    h = _hash_to_subgroup(b"ransomgame-h|%d|" % rng_seed, P)
    return GroupParams(p=P, q=Q, g=G, h=h, chunk_bits=chunk_bits)
