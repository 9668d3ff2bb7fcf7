"""Knapsack instances and their QUBO / Ising encodings.

A knapsack instance (items with value v and weight w, capacity W) is encoded
as the unconstrained minimization of

    -sum_i v_i x_i  +  M * (sum_i w_i x_i + sum_j c_j y_j - W)^2

over item bits x and binary slack bits y.  The slack coefficients c_j cover
every residual in [0, W], so the penalty term vanishes exactly on feasible
selections with correctly-set slack.  The default penalty M = 1 + sum(v)
makes any one-unit constraint violation cost more than the best achievable
profit.

Variable order everywhere: item bits first (index 0 .. n-1), slack bits after.
Bitstrings may be given as '01' strings or integer sequences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .errors import DataError


class Item(NamedTuple):
    v: int
    w: int


@dataclass(frozen=True)
class Lineage:
    """Provenance of a derived instance; all fields None for seed instances."""

    parent: str | None = None
    category: str | None = None
    fraction: float | None = None


@dataclass(frozen=True)
class KnapsackInstance:
    name: str
    items: tuple[Item, ...]
    capacity: int
    lineage: Lineage | None = None

    def __post_init__(self) -> None:
        if not self.items:
            raise ValueError("instance needs at least one item")
        for it in self.items:
            if int(it.v) < 1 or int(it.w) < 1:
                raise ValueError(f"item values and weights must be >= 1, got {it}")
        total = sum(it.w for it in self.items)
        if not 1 <= self.capacity <= total:
            raise ValueError(
                f"capacity must lie in [1, {total}] (sum of weights), got {self.capacity}"
            )

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(it.v for it in self.items)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(it.w for it in self.items)

    def default_penalty(self) -> int:
        """Smallest simple penalty that dominates the objective: 1 + sum of values."""
        return 1 + sum(self.values)

    @classmethod
    def from_pairs(
        cls,
        name: str,
        pairs: Iterable[tuple[int, int]],
        capacity: int,
        lineage: Lineage | None = None,
    ) -> "KnapsackInstance":
        return cls(name, tuple(Item(int(v), int(w)) for v, w in pairs), int(capacity), lineage)

    def to_dict(self) -> dict:
        lin = self.lineage or Lineage()
        return {
            "name": self.name,
            "items": [{"v": it.v, "w": it.w} for it in self.items],
            "capacity": self.capacity,
            "lineage": {
                "parent": lin.parent,
                "category": lin.category,
                "fraction": lin.fraction,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KnapsackInstance":
        try:
            items = tuple(Item(int(d["v"]), int(d["w"])) for d in data["items"])
            lin = data.get("lineage") or {}
            lineage = Lineage(lin.get("parent"), lin.get("category"), lin.get("fraction"))
            if lineage == Lineage():
                lineage = None
            return cls(str(data["name"]), items, int(data["capacity"]), lineage)
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed instance record: {exc}") from exc


def load_instance(path: str | Path) -> KnapsackInstance:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from exc
    try:
        return KnapsackInstance.from_dict(data)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


def save_instance(instance: KnapsackInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance.to_dict(), indent=2, sort_keys=True) + "\n")


def slack_bit_count(capacity: int) -> int:
    """Number of binary slack bits needed to represent every residual in [0, capacity]."""
    if capacity < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    return int(math.floor(math.log2(capacity))) + 1


def slack_coefficients(capacity: int) -> tuple[int, ...]:
    """Bounded binary encoding: powers of two plus a remainder coefficient.

    c_j = 2^j for j < s-1 and c_{s-1} = capacity - (2^{s-1} - 1), which makes
    sum(c) = capacity and every integer in [0, capacity] representable.
    """
    s = slack_bit_count(capacity)
    coeffs = [1 << j for j in range(s - 1)]
    coeffs.append(capacity - ((1 << (s - 1)) - 1))
    return tuple(coeffs)


def encode_slack(residual: int, capacity: int) -> tuple[int, ...]:
    """Canonical slack bits for a residual: plain binary when it fits below the
    remainder coefficient's reach, otherwise the remainder bit plus binary rest."""
    if not 0 <= residual <= capacity:
        raise ValueError(f"residual must lie in [0, {capacity}], got {residual}")
    coeffs = slack_coefficients(capacity)
    s = len(coeffs)
    bits = [0] * s
    top = (1 << (s - 1)) - 1  # reach of the power-of-two bits
    if residual > top:
        bits[s - 1] = 1
        residual -= coeffs[s - 1]
    for j in range(s - 1):
        bits[j] = (residual >> j) & 1
    return tuple(bits)


@dataclass(frozen=True)
class QuboModel:
    """Quadratic binary objective: offset + sum linear_i x_i + sum quadratic_ij x_i x_j.

    Quadratic keys are (i, j) with i < j; diagonal terms live in `linear`.
    """

    num_vars: int
    linear: dict[int, float]
    quadratic: dict[tuple[int, int], float]
    offset: float
    item_count: int
    slack_count: int
    penalty: float

    def __post_init__(self) -> None:
        if self.num_vars != self.item_count + self.slack_count:
            raise ValueError("num_vars must equal item_count + slack_count")
        for i, j in self.quadratic:
            if not 0 <= i < j < self.num_vars:
                raise ValueError(f"quadratic key ({i}, {j}) must satisfy 0 <= i < j < num_vars")


@dataclass(frozen=True)
class IsingModel:
    """Spin-space equivalent of a QuboModel under z = 1 - 2x (spins in {-1, +1})."""

    num_vars: int
    h: dict[int, float]
    J: dict[tuple[int, int], float]
    offset: float


class Selection(NamedTuple):
    chosen: tuple[int, ...]
    total_value: int
    total_weight: int
    feasible: bool


def as_bits(bits: str | Sequence[int], num_vars: int | None = None) -> tuple[int, ...]:
    """Normalize a bitstring ('0101' or int sequence) to a tuple of 0/1 ints."""
    if isinstance(bits, str):
        try:
            out = tuple(int(ch) for ch in bits.strip())
        except ValueError:
            raise ValueError(f"bitstring contains non-binary characters: {bits!r}") from None
    else:
        out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ValueError(f"bits must be 0 or 1, got {out}")
    if num_vars is not None and len(out) != num_vars:
        raise ValueError(f"expected {num_vars} bits, got {len(out)}")
    return out


def bits_to_str(bits: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in bits)


def build_qubo(instance: KnapsackInstance, penalty: float | None = None) -> QuboModel:
    """Expand the penalized knapsack objective to linear/quadratic/offset form."""
    M = float(penalty) if penalty is not None else float(instance.default_penalty())
    if M <= 0:
        raise ValueError(f"penalty must be positive, got {M}")
    W = instance.capacity
    coeffs = slack_coefficients(W)
    n, s = instance.n, len(coeffs)
    a = [float(w) for w in instance.weights] + [float(c) for c in coeffs]

    linear: dict[int, float] = {}
    for i in range(n + s):
        lin = M * a[i] * a[i] - 2.0 * M * W * a[i]
        if i < n:
            lin -= instance.values[i]
        linear[i] = lin
    quadratic: dict[tuple[int, int], float] = {}
    for i in range(n + s):
        for j in range(i + 1, n + s):
            quadratic[(i, j)] = 2.0 * M * a[i] * a[j]
    return QuboModel(
        num_vars=n + s,
        linear=linear,
        quadratic=quadratic,
        offset=M * float(W) * float(W),
        item_count=n,
        slack_count=s,
        penalty=M,
    )


def qubo_to_ising(model: QuboModel) -> IsingModel:
    """Exact substitution x_i = (1 - z_i) / 2; energies agree on every state."""
    h: dict[int, float] = {}
    J: dict[tuple[int, int], float] = {}
    offset = model.offset
    for i, c in model.linear.items():
        h[i] = h.get(i, 0.0) - c / 2.0
        offset += c / 2.0
    for (i, j), c in model.quadratic.items():
        J[(i, j)] = J.get((i, j), 0.0) + c / 4.0
        h[i] = h.get(i, 0.0) - c / 4.0
        h[j] = h.get(j, 0.0) - c / 4.0
        offset += c / 4.0
    return IsingModel(num_vars=model.num_vars, h=h, J=J, offset=offset)


def energy(model: QuboModel, bits: str | Sequence[int]) -> float:
    """QUBO energy of a bitstring."""
    x = as_bits(bits, model.num_vars)
    e = model.offset
    for i, c in model.linear.items():
        if x[i]:
            e += c
    for (i, j), c in model.quadratic.items():
        if x[i] and x[j]:
            e += c
    return e


def ising_energy(model: IsingModel, spins: Sequence[int]) -> float:
    """Ising energy of a spin assignment (+1/-1)."""
    if len(spins) != model.num_vars:
        raise ValueError(f"expected {model.num_vars} spins, got {len(spins)}")
    e = model.offset
    for i, hi in model.h.items():
        e += hi * spins[i]
    for (i, j), jij in model.J.items():
        e += jij * spins[i] * spins[j]
    return e


def decode(instance: KnapsackInstance, bits: str | Sequence[int]) -> Selection:
    """Read the item selection off a full bitstring; slack bits are ignored
    for feasibility (feasible iff total weight <= capacity)."""
    s = slack_bit_count(instance.capacity)
    x = as_bits(bits, instance.n + s)
    chosen = tuple(i for i in range(instance.n) if x[i])
    tv = sum(instance.values[i] for i in chosen)
    tw = sum(instance.weights[i] for i in chosen)
    return Selection(chosen, tv, tw, tw <= instance.capacity)


def tuple_impact(v: int, w: int, capacity: int, penalty: float) -> float:
    """Linear QUBO coefficient an item with this (value, weight) tuple receives."""
    return -float(v) + penalty * w * w - 2.0 * penalty * capacity * w


def linear_impact(instance: KnapsackInstance, penalty: float, item_index: int) -> float:
    """Energy impact of one item: its diagonal coefficient in the QUBO."""
    if not 0 <= item_index < instance.n:
        raise IndexError(f"item index {item_index} out of range for n={instance.n}")
    it = instance.items[item_index]
    return tuple_impact(it.v, it.w, instance.capacity, float(penalty))
