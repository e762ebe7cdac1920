"""Economic domain types shared by every other module.

All monetary quantities are 64-bit floats in token units.  Types are
immutable value objects after construction and safe to share across
threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
QUADRATIC = "quadratic"
LINEAR = "linear"
CIRCULAR = "circular"
CUSTOM = "custom"

BUILTIN_DECAYS = (QUADRATIC, LINEAR, CIRCULAR)

#: Sentinel abort round meaning "the victim pays every round".
PAY_ALL = None


class InvalidInstanceError(ValueError):
    """Raised when an operation receives an instance that fails validation."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class DecayProfile:
    """Fraction of the data's confidentiality value remaining at time x in [0,1].

    ``values`` is only used for CUSTOM profiles: values[j] is f(j/(len-1))
    on an evenly spaced grid, and must be non-increasing.
    """

    kind: str = LINEAR
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in BUILTIN_DECAYS + (CUSTOM,):
            raise ValueError(f"unknown decay kind {self.kind!r}")
        if self.kind == CUSTOM:
            if not self.values or len(self.values) < 2:
                raise ValueError("custom decay needs at least two table values")
            for j in range(1, len(self.values)):
                if self.values[j] > self.values[j - 1]:
                    raise ValueError(
                        f"custom decay table increases at index {j}"
                    )
        elif self.values is not None:
            raise ValueError("table values are only allowed for custom decay")

    def __call__(self, x: float) -> float:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"decay evaluated outside [0,1]: {x}")
        if self.kind == QUADRATIC:
            return (1.0 - x) ** 2
        if self.kind == LINEAR:
            return 1.0 - x
        if self.kind == CIRCULAR:
            return math.sqrt(max(0.0, 1.0 - x * x))
        table = self.values
        pos = x * (len(table) - 1)
        lo = int(math.floor(pos))
        if lo >= len(table) - 1:
            return table[-1]
        frac = pos - lo
        return table[lo] * (1.0 - frac) + table[lo + 1] * frac


@dataclass(frozen=True)
class GameInstance:
    """All economic parameters of one attack.

    ``ransoms``, ``losses`` and ``sale_profits`` are per-round vectors of
    length n.  Losses must be non-increasing: the data's confidentiality
    value decays over time.
    """

    n: int
    ransoms: tuple[float, ...]
    data_value: float
    recovery_cost: float
    losses: tuple[float, ...]
    sale_profits: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "ransoms", tuple(float(r) for r in self.ransoms))
        object.__setattr__(self, "losses", tuple(float(x) for x in self.losses))
        object.__setattr__(
            self, "sale_profits", tuple(float(x) for x in self.sale_profits)
        )

    def require_valid(self) -> "GameInstance":
        violations = validate_instance(self)
        if violations:
            raise InvalidInstanceError(violations)
        return self

    def total_ransom(self) -> float:
        return sum(self.ransoms)


@dataclass(frozen=True)
class Reputation:
    """Attacker behavior vector.

    ``beta_r`` is the probability of returning the key after the first
    payment; ``betas[i]`` is the probability of selling the data in round
    i+1 after that round's payment.
    """

    beta_r: float
    betas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if not 0.0 <= self.beta_r <= 1.0:
            raise ValueError(f"beta_r out of [0,1]: {self.beta_r}")
        for i, b in enumerate(self.betas):
            if not 0.0 <= b <= 1.0:
                raise ValueError(f"beta_{i + 1} out of [0,1]: {b}")

    @property
    def n(self) -> int:
        return len(self.betas)

    @classmethod
    def worst(cls, n: int) -> "Reputation":
        """Never return the key, always sell."""
        return cls(0.0, (1.0,) * n)

    @classmethod
    def perfect(cls, n: int) -> "Reputation":
        """Always return the key, never sell after a payment."""
        return cls(1.0, (0.0,) * n)

    def as_vector(self) -> tuple[float, ...]:
        return (self.beta_r,) + self.betas


@dataclass(frozen=True)
class VictimPolicy:
    """Victim best response: pay rounds before ``abort_round``, refuse there.

    ``abort_round`` is a 1-based round index, or PAY_ALL (None) when paying
    every round is optimal.  ``continuation_values`` holds the per-round
    thresholds from the backward recursion; ``expected_loss`` is the
    victim's expected total loss under the policy.
    """

    abort_round: int | None
    continuation_values: tuple[float, ...]
    expected_loss: float

    @property
    def pays_all(self) -> bool:
        return self.abort_round is PAY_ALL

    def rounds_paid(self, n: int) -> int:
        return n if self.abort_round is PAY_ALL else self.abort_round - 1


def build_profiles(
    V: float, n: int, decay: DecayProfile, sale_ratio: float
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Per-round leak losses L_i = f(i/n) * V and sale profits A_i = ratio * L_i."""
    if n < 1:
        raise ValueError("round count must be at least 1")
    if V < 0:
        raise ValueError("data value must be non-negative")
    if not 0.0 <= sale_ratio <= 1.0:
        raise ValueError(f"sale ratio out of [0,1]: {sale_ratio}")
    losses = tuple(decay(i / n) * V for i in range(1, n + 1))
    sales = tuple(sale_ratio * loss for loss in losses)
    return losses, sales


def make_instance(
    V: float,
    n: int,
    total_ransom: float,
    first_round_fraction: float = 0.5,
    decay: DecayProfile | str = LINEAR,
    sale_ratio: float = 0.7,
    recovery_cost: float = 0.0,
    first_round_ransom: float | None = None,
) -> GameInstance:
    """Build an instance with the canonical ransom schedule.

    The first round carries ``first_round_fraction`` of the total (or the
    explicit ``first_round_ransom`` when given) and the remainder is split
    evenly across rounds 2..n.
    """
    if isinstance(decay, str):
        decay = DecayProfile(decay)
    if first_round_ransom is None:
        first_round_ransom = first_round_fraction * total_ransom
    if n == 1:
        ransoms = (total_ransom,)
    else:
        rest = (total_ransom - first_round_ransom) / (n - 1)
        ransoms = (first_round_ransom,) + (rest,) * (n - 1)
    losses, sales = build_profiles(V, n, decay, sale_ratio)
    return GameInstance(
        n=n,
        ransoms=ransoms,
        data_value=V,
        recovery_cost=recovery_cost,
        losses=losses,
        sale_profits=sales,
    )


def validate_instance(inst: GameInstance) -> list[str]:
    """Return every violated invariant with a field path; empty means ok."""
    out: list[str] = []
    if inst.n < 1:
        out.append("n: round count must be at least 1")
    for name in ("ransoms", "losses", "sale_profits"):
        vec = getattr(inst, name)
        if len(vec) != inst.n:
            out.append(f"{name}: length {len(vec)} differs from n={inst.n}")
        for i, x in enumerate(vec):
            if not math.isfinite(x):
                out.append(f"{name}[{i}]: not finite")
            elif x < 0:
                out.append(f"{name}[{i}]: negative value {x}")
    for i, r in enumerate(inst.ransoms):
        if math.isfinite(r) and r <= 0:
            out.append(f"ransoms[{i}]: ransom must be positive")
    for i in range(1, min(len(inst.losses), inst.n)):
        if inst.losses[i] > inst.losses[i - 1]:
            out.append(f"losses: not non-increasing at index {i}")
    for name in ("data_value", "recovery_cost"):
        x = getattr(inst, name)
        if not math.isfinite(x):
            out.append(f"{name}: not finite")
        elif x < 0:
            out.append(f"{name}: negative value {x}")
    return out


def check_reputation(inst: GameInstance, rep: Reputation) -> None:
    if rep.n != inst.n:
        raise ValueError(
            f"reputation length {rep.n} does not match instance rounds {inst.n}"
        )


# --- JSON wire format -------------------------------------------------------
#
# Keys: n, ransoms, data_value, recovery_cost, decay, sale_ratio, and
# optionally explicit losses / sale_profits overriding the derived profiles.

def instance_to_json(inst: GameInstance) -> dict:
    return {
        "n": inst.n,
        "ransoms": list(inst.ransoms),
        "data_value": inst.data_value,
        "recovery_cost": inst.recovery_cost,
        "losses": list(inst.losses),
        "sale_profits": list(inst.sale_profits),
    }


def instance_from_json(obj: dict) -> GameInstance:
    try:
        n = int(obj["n"])
        ransoms = tuple(float(r) for r in obj["ransoms"])
        V = float(obj["data_value"])
    except KeyError as exc:
        raise ValueError(f"missing required instance key: {exc.args[0]}") from None
    recovery = float(obj.get("recovery_cost", 0.0))
    if "losses" in obj:
        losses = tuple(float(x) for x in obj["losses"])
        if "sale_profits" in obj:
            sales = tuple(float(x) for x in obj["sale_profits"])
        else:
            ratio = float(obj.get("sale_ratio", 0.7))
            sales = tuple(ratio * x for x in losses)
    else:
        decay = DecayProfile(obj.get("decay", LINEAR))
        ratio = float(obj.get("sale_ratio", 0.7))
        losses, sales = build_profiles(V, n, decay, ratio)
    inst = GameInstance(
        n=n,
        ransoms=ransoms,
        data_value=V,
        recovery_cost=recovery,
        losses=losses,
        sale_profits=sales,
    )
    return inst


def load_instance(path: str) -> GameInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_json(json.load(fh))


def policy_to_json(policy: VictimPolicy) -> dict:
    return {
        "abort_round": "pay_all" if policy.abort_round is PAY_ALL else policy.abort_round,
        "continuation_values": list(policy.continuation_values),
        "expected_loss": policy.expected_loss,
    }
