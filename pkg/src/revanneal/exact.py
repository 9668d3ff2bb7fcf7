"""Ground-truth machinery: exact knapsack optima, exhaustive QUBO minimization,
Hamming decomposition and cross-instance energy evaluation.

State indexing convention: state index k maps to the bitstring given by the
binary expansion of k with variable 0 as the most significant bit, so numeric
index order equals lexicographic bitstring order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import SizeError
from .knapsack import (
    KnapsackInstance,
    QuboModel,
    as_bits,
    bits_to_str,
    encode_slack,
    energy,
    slack_bit_count,
)

SUBSET_ENUM_LIMIT = 26
STATE_ENUM_LIMIT = 24
_CHUNK = 1 << 16


def index_to_bits(k: int, num_vars: int) -> str:
    return format(k, f"0{num_vars}b")


def bits_to_index(bits: str | Sequence[int]) -> int:
    return int(bits_to_str(as_bits(bits)), 2)


@dataclass(frozen=True)
class OptimalSolution:
    """Exact constrained optimum with its canonical full bitstring."""

    selection: str  # item bits only
    profit: int
    qubo_energy: float  # -profit under the default-penalty encoding
    bits: str  # items + canonical slack for the unused capacity


@dataclass(frozen=True)
class GroundStates:
    energy: float
    states: tuple[str, ...]  # lexicographically first minimizers, possibly capped
    count: int  # total number of minimizers
    truncated: bool


class Hamming(NamedTuple):
    h: int
    n_h: int
    s_h: int


@dataclass(frozen=True)
class ClosenessReport:
    """How close a source solution sits to a target's best: bit differences
    split into item/slack parts plus the energy view."""

    h: int
    n_h: int
    s_h: int
    energy_cross: float
    energy_gap: float


def solve_exact(instance: KnapsackInstance) -> OptimalSolution:
    """Exhaustive scan of all 2^n item subsets.  Ties in profit resolve to the
    lexicographically smallest selection bitstring."""
    n = instance.n
    if n > SUBSET_ENUM_LIMIT:
        raise SizeError(f"n={n} exceeds the subset enumeration bound {SUBSET_ENUM_LIMIT}")
    v = np.array(instance.values, dtype=np.int64)
    w = np.array(instance.weights, dtype=np.int64)
    shifts = (n - 1) - np.arange(n)
    best_profit = -1
    best_index = 0
    best_weight = 0
    for start in range(0, 1 << n, _CHUNK):
        ks = np.arange(start, min(start + _CHUNK, 1 << n), dtype=np.int64)
        bits = (ks[:, None] >> shifts) & 1
        weights = bits @ w
        profits = np.where(weights <= instance.capacity, bits @ v, -1)
        j = int(np.argmax(profits))
        if profits[j] > best_profit:
            best_profit = int(profits[j])
            best_index = start + j
            best_weight = int(weights[j])
    selection = index_to_bits(best_index, n)
    slack = encode_slack(instance.capacity - best_weight, instance.capacity)
    return OptimalSolution(
        selection=selection,
        profit=best_profit,
        qubo_energy=-float(best_profit),
        bits=selection + bits_to_str(slack),
    )


def all_state_energies(model: QuboModel) -> np.ndarray:
    """QUBO energy of every one of the 2^num_vars states, indexed per the
    module convention.  Accumulation order is fixed, so results are
    bit-reproducible."""
    n = model.num_vars
    if n > STATE_ENUM_LIMIT:
        raise SizeError(f"num_vars={n} exceeds the state enumeration bound {STATE_ENUM_LIMIT}")
    size = 1 << n
    idx = np.arange(size, dtype=np.uint32)
    pats = [((idx >> np.uint32(n - 1 - u)) & np.uint32(1)).astype(np.uint8) for u in range(n)]
    e = np.full(size, float(model.offset), dtype=np.float64)
    for i in sorted(model.linear):
        c = model.linear[i]
        if c:
            e += c * pats[i]
    for i, j in sorted(model.quadratic):
        c = model.quadratic[(i, j)]
        if c:
            e += c * (pats[i] & pats[j])
    return e


def qubo_ground_states(
    model: QuboModel, max_states: int = 32, atol: float = 1e-9
) -> GroundStates:
    """Exhaustive minimum over all states; minimizers within atol of the
    minimum are collected (capped at max_states, with a flag)."""
    energies = all_state_energies(model)
    emin = float(energies.min())
    minimizers = np.flatnonzero(energies <= emin + atol)
    count = int(minimizers.size)
    states = tuple(index_to_bits(int(k), model.num_vars) for k in minimizers[:max_states])
    return GroundStates(energy=emin, states=states, count=count, truncated=count > max_states)


def hamming_decompose(
    a: str | Sequence[int], b: str | Sequence[int], item_count: int
) -> Hamming:
    """Count differing positions, split into item bits (first item_count
    positions) and slack bits (the rest)."""
    xa = as_bits(a)
    xb = as_bits(b)
    if len(xa) != len(xb):
        raise ValueError(f"length mismatch: {len(xa)} vs {len(xb)}")
    if not 0 <= item_count <= len(xa):
        raise ValueError(f"item_count {item_count} out of range for length {len(xa)}")
    n_h = sum(1 for i in range(item_count) if xa[i] != xb[i])
    s_h = sum(1 for i in range(item_count, len(xa)) if xa[i] != xb[i])
    return Hamming(n_h + s_h, n_h, s_h)


def cross_energy(
    target: QuboModel, source_best: str | Sequence[int], target_best_energy: float
) -> tuple[float, float]:
    """Energy a source solution scores under the target's objective, and its
    gap above the target's best energy."""
    bits = as_bits(source_best)
    if len(bits) != target.num_vars:
        raise ValueError(
            f"incompatible instances: source has {len(bits)} bits, target model "
            f"has {target.num_vars} variables"
        )
    e = energy(target, bits)
    return e, e - target_best_energy


def closeness_report(
    target: QuboModel,
    source_best: str | Sequence[int],
    target_best: str | Sequence[int],
    target_best_energy: float,
) -> ClosenessReport:
    """Bundle Hamming decomposition and cross energy against one target."""
    ham = hamming_decompose(source_best, target_best, target.item_count)
    e_cross, gap = cross_energy(target, source_best, target_best_energy)
    return ClosenessReport(ham.h, ham.n_h, ham.s_h, e_cross, gap)


def canonical_optimum_bits(instance: KnapsackInstance) -> str:
    """Full bitstring of the exact optimum (items + canonical slack)."""
    return solve_exact(instance).bits


def instance_slack_count(instance: KnapsackInstance) -> int:
    return slack_bit_count(instance.capacity)
