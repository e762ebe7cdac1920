"""Verifiable per-chunk encryption with equality proofs.

The data is split into chunk_bits-wide values m_j.  Each chunk carries a
commitment cm_j = g^{m_j}, a ciphertext pair (u_j, v_j) = (g^{r_j},
vk^{r_j} * cm_j), and a two-base sigma proof that log_g(u_j) equals
log_vk(v_j / cm_j), so the ciphertext provably opens to the committed
chunk under the key matching vk.  Challenges are hash-derived over the
full transcript, binding vk, the commitment digest, and the chunk index.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .group import GroupParams

_TABLE_CACHE: dict[tuple[int, int, int], dict[int, int]] = {}


@dataclass(frozen=True)
class ChunkProof:
    t1: int
    t2: int
    z: int


@dataclass(frozen=True)
class VeckBundle:
    vk: int
    commitments: tuple[int, ...]
    commit_digest: bytes
    ciphertext: tuple[tuple[int, int], ...]
    proofs: tuple[ChunkProof, ...]
    data_length: int
    data_digest: bytes


@dataclass(frozen=True)
class VerifyOutcome:
    accepted: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.accepted


def _encode(*parts) -> bytes:
    out = bytearray()
    for part in parts:
        if isinstance(part, int):
            part = part.to_bytes((part.bit_length() + 7) // 8 or 1, "big")
        out += len(part).to_bytes(4, "big") + part
    return bytes(out)


def _challenge(params: GroupParams, vk: int, digest: bytes, index: int,
               cm: int, u: int, v: int, t1: int, t2: int) -> int:
    material = _encode(
        b"ransomgame-dleq-v1", params.p, params.g, params.chunk_bits,
        vk, digest, index, cm, u, v, t1, t2,
    )
    return int.from_bytes(hashlib.sha256(material).digest(), "big") % params.q


def commitment_digest(params: GroupParams, commitments: tuple[int, ...],
                      data_length: int) -> bytes:
    return hashlib.sha256(
        _encode(b"ransomgame-commit-v1", params.p, params.g, data_length,
                *commitments)
    ).digest()


def pack_chunks(data: bytes, chunk_bits: int) -> list[int]:
    """Split the byte string into chunk_bits-wide integers, zero-padded."""
    bits = int.from_bytes(data, "big")
    total_bits = len(data) * 8
    count = (total_bits + chunk_bits - 1) // chunk_bits
    pad = count * chunk_bits - total_bits
    bits <<= pad
    mask = (1 << chunk_bits) - 1
    return [(bits >> (chunk_bits * (count - 1 - j))) & mask for j in range(count)]


def unpack_chunks(chunks: list[int], chunk_bits: int, length: int) -> bytes:
    bits = 0
    for c in chunks:
        bits = (bits << chunk_bits) | c
    total_bits = len(chunks) * chunk_bits
    pad = total_bits - length * 8
    bits >>= pad
    return bits.to_bytes(length, "big") if length else b""


def encrypt_with_proof(
    params: GroupParams, data: bytes, rng: random.Random
) -> tuple[int, VeckBundle]:
    """Encrypt ``data`` chunk-wise and prove every ciphertext opens to its
    commitment under the key matching vk.  Returns (sk, bundle)."""
    if not data:
        raise ValueError("refusing to encrypt empty data")
    p, q, g = params.p, params.q, params.g
    chunks = pack_chunks(data, params.chunk_bits)
    sk = rng.randrange(1, q)
    vk = pow(g, sk, p)
    commitments = tuple(pow(g, m, p) for m in chunks)
    digest = commitment_digest(params, commitments, len(data))

    ciphertext = []
    proofs = []
    for j, (m, cm) in enumerate(zip(chunks, commitments)):
        r = rng.randrange(1, q)
        u = pow(g, r, p)
        v = pow(vk, r, p) * cm % p
        w = rng.randrange(1, q)
        t1 = pow(g, w, p)
        t2 = pow(vk, w, p)
        c = _challenge(params, vk, digest, j, cm, u, v, t1, t2)
        z = (w + c * r) % q
        ciphertext.append((u, v))
        proofs.append(ChunkProof(t1, t2, z))

    bundle = VeckBundle(
        vk=vk,
        commitments=commitments,
        commit_digest=digest,
        ciphertext=tuple(ciphertext),
        proofs=tuple(proofs),
        data_length=len(data),
        data_digest=hashlib.sha256(data).digest(),
    )
    return sk, bundle


def verify_cipher_data(
    params: GroupParams,
    commit_digest: bytes,
    vk: int,
    commitments: tuple[int, ...],
    ciphertext: tuple[tuple[int, int], ...],
    proofs: tuple[ChunkProof, ...],
    data_length: int,
) -> VerifyOutcome:
    """Accept iff the digest matches the commitments and every per-chunk
    equality proof verifies.  Never touches sk."""
    p = params.p
    if not (len(commitments) == len(ciphertext) == len(proofs)):
        return VerifyOutcome(False, "bundle length mismatch")
    if not params.in_subgroup(vk):
        return VerifyOutcome(False, "vk outside the subgroup")
    if commitment_digest(params, commitments, data_length) != commit_digest:
        return VerifyOutcome(False, "commitment digest mismatch")
    for j, (cm, (u, v), proof) in enumerate(zip(commitments, ciphertext, proofs)):
        for name, e in (("commitment", cm), ("u", u), ("v", v),
                        ("t1", proof.t1), ("t2", proof.t2)):
            if not params.in_subgroup(e):
                return VerifyOutcome(False, f"chunk {j}: {name} outside the subgroup")
        if not 0 <= proof.z < params.q:
            return VerifyOutcome(False, f"chunk {j}: response out of range")
        c = _challenge(params, vk, commit_digest, j, cm, u, v, proof.t1, proof.t2)
        lhs1 = pow(params.g, proof.z, p)
        rhs1 = proof.t1 * pow(u, c, p) % p
        if lhs1 != rhs1:
            return VerifyOutcome(False, f"chunk {j}: first equation failed")
        opened = v * pow(cm, p - 2, p) % p
        lhs2 = pow(vk, proof.z, p)
        rhs2 = proof.t2 * pow(opened, c, p) % p
        if lhs2 != rhs2:
            return VerifyOutcome(False, f"chunk {j}: second equation failed")
    return VerifyOutcome(True)


def verify_bundle(params: GroupParams, bundle: VeckBundle) -> VerifyOutcome:
    return verify_cipher_data(
        params, bundle.commit_digest, bundle.vk, bundle.commitments,
        bundle.ciphertext, bundle.proofs, bundle.data_length,
    )


def verify_key(params: GroupParams, vk: int, sk: int) -> bool:
    """True iff g^sk = vk; out-of-range keys simply fail the check."""
    if not 1 <= sk < params.q:
        return False
    return pow(params.g, sk, params.p) == vk


class ChunkDecryptionError(ValueError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"chunk {index}: no discrete log in the chunk range")


def _chunk_table(params: GroupParams) -> dict[int, int]:
    key = (params.p, params.g, params.chunk_bits)
    table = _TABLE_CACHE.get(key)
    if table is None:
        table = {}
        acc = 1
        for m in range(1 << params.chunk_bits):
            table[acc] = m
            acc = acc * params.g % params.p
        _TABLE_CACHE[key] = table
    return table


def decrypt(
    params: GroupParams,
    sk: int,
    ciphertext: tuple[tuple[int, int], ...],
    length: int,
) -> bytes:
    """Recover cm_j = v_j * u_j^{-sk}, look the chunk value up, reassemble."""
    p, q = params.p, params.q
    table = _chunk_table(params)
    chunks = []
    for j, (u, v) in enumerate(ciphertext):
        cm = v * pow(u, (q - sk) % q, p) % p
        m = table.get(cm)
        if m is None:
            raise ChunkDecryptionError(j)
        chunks.append(m)
    return unpack_chunks(chunks, params.chunk_bits, length)
