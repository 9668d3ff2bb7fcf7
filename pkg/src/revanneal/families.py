"""Parent instance generation and derivation of descendant families.

A descendant starts as a copy of its parent.  The parent's distinct item
tuples are ranked by energy impact (the linear QUBO coefficient); a chosen
fraction of the items at one end of that ranking is then shifted one rank
toward lower or higher impact.  Items carrying the extreme tuples are never
touched, and all replacements are read from the parent's ranking computed
once up front, so the substitution is simultaneous and order-independent.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .knapsack import Item, KnapsackInstance, Lineage, tuple_impact

DIRECTIONS = ("L2L", "L2H", "H2L", "H2H")
FRACTIONS = (0.2, 0.4, 0.6, 0.8)


@dataclass(frozen=True)
class Category:
    """One descendant category: which end of the impact ranking is modified
    (L2* lowest, H2* highest) and in which direction (*2L lower, *2H higher),
    applied to a fraction of the items."""

    direction: str
    fraction: float

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if self.fraction not in FRACTIONS:
            raise ValueError(f"fraction must be one of {FRACTIONS}, got {self.fraction}")

    @property
    def label(self) -> str:
        return f"{self.fraction:g}_{self.direction}"


@dataclass(frozen=True)
class ImpactTable:
    """Distinct item tuples of an instance with their impact, ascending by
    impact, ties broken by (v, w)."""

    entries: tuple[tuple[Item, float], ...]

    def __post_init__(self) -> None:
        tuples = [e[0] for e in self.entries]
        if len(set(tuples)) != len(tuples):
            raise ValueError("impact table entries must be distinct tuples")

    def __len__(self) -> int:
        return len(self.entries)

    def position(self, item: Item) -> int:
        for k, (it, _) in enumerate(self.entries):
            if it == item:
                return k
        raise KeyError(f"{item} not in impact table")

    def impact_of(self, item: Item) -> float:
        return self.entries[self.position(item)][1]


def gen_parent(n: int, seed: int, name: str | None = None) -> KnapsackInstance:
    """Random parent: n items with v, w drawn uniformly from {1,2,3,4},
    capacity = floor(sum of weights / 2).  Deterministic for fixed (n, seed)."""
    if n < 2:
        raise ValueError(f"need at least 2 items, got n={n}")
    rng = np.random.default_rng(seed)
    draws = rng.integers(1, 5, size=(n, 2))
    items = tuple(Item(int(v), int(w)) for v, w in draws)
    capacity = sum(it.w for it in items) // 2
    return KnapsackInstance(name or f"s{n}", items, capacity)


def unique_items_with_impact(parent: KnapsackInstance) -> ImpactTable:
    """Impact table of the parent's distinct tuples, using the parent's
    capacity and default penalty."""
    M = float(parent.default_penalty())
    seen = sorted(set(parent.items))
    entries = [(it, tuple_impact(it.v, it.w, parent.capacity, M)) for it in seen]
    entries.sort(key=lambda e: (e[1], e[0]))
    return ImpactTable(tuple(entries))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def derive_descendant(parent: KnapsackInstance, category: Category) -> KnapsackInstance:
    """Copy of the parent with k = round(fraction * n) items shifted one rank
    in the impact table.  Capacity and item count are inherited unchanged."""
    table = unique_items_with_impact(parent)
    if len(table) < 3:
        raise ValueError(
            f"cannot derive a descendant of {parent.name!r}: impact table has "
            f"{len(table)} entries, need at least 3"
        )
    lowest = table.entries[0][0]
    highest = table.entries[-1][0]
    pool = [i for i, it in enumerate(parent.items) if it != lowest and it != highest]

    k = _round_half_up(category.fraction * parent.n)
    if k > len(pool):
        warnings.warn(
            f"{parent.name} {category.label}: only {len(pool)} modifiable items "
            f"for k={k}; modifying all of them",
            stacklevel=2,
        )
        picked = list(pool)
    else:
        if category.direction.startswith("L"):
            ranked = sorted(pool, key=lambda i: (table.impact_of(parent.items[i]), i))
        else:
            ranked = sorted(pool, key=lambda i: (-table.impact_of(parent.items[i]), i))
        picked = ranked[:k]

    step = 1 if category.direction.endswith("H") else -1
    new_items = list(parent.items)
    for i in picked:
        pos = table.position(parent.items[i]) + step
        pos = min(max(pos, 0), len(table) - 1)
        new_items[i] = table.entries[pos][0]

    return KnapsackInstance(
        name=f"{parent.name}_{category.label}",
        items=tuple(new_items),
        capacity=parent.capacity,
        lineage=Lineage(parent.name, category.direction, category.fraction),
    )


def gen_family(parent: KnapsackInstance) -> tuple[KnapsackInstance, ...]:
    """The 16 descendants of a parent, one per (fraction, direction) pair."""
    return tuple(
        derive_descendant(parent, Category(direction, fraction))
        for fraction in FRACTIONS
        for direction in DIRECTIONS
    )
