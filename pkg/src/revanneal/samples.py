"""SampleSet: the multiset of measured bitstrings shared by all sampler backends."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SampleRecord:
    bits: str
    energy: float
    count: int


@dataclass(frozen=True)
class SampleSet:
    """Records are sorted by (energy, bits), so records[0] is the best read."""

    records: tuple[SampleRecord, ...]
    total_reads: int
    backend: str
    seed: int

    def __post_init__(self) -> None:
        if sum(r.count for r in self.records) != self.total_reads:
            raise ValueError("record counts must sum to total_reads")

    @property
    def best(self) -> SampleRecord:
        return self.records[0]

    def mean_energy(self) -> float:
        return sum(r.energy * r.count for r in self.records) / self.total_reads

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "seed": self.seed,
            "total_reads": self.total_reads,
            "records": [
                {"bits": r.bits, "energy": r.energy, "count": r.count} for r in self.records
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SampleSet":
        return cls(
            records=tuple(
                SampleRecord(d["bits"], float(d["energy"]), int(d["count"]))
                for d in data["records"]
            ),
            total_reads=int(data["total_reads"]),
            backend=str(data["backend"]),
            seed=int(data["seed"]),
        )


def build_sampleset(
    bitstrings: list[str],
    energy_of,
    backend: str,
    seed: int,
) -> SampleSet:
    """Aggregate raw per-read bitstrings into sorted (bits, energy, count) records."""
    counts: dict[str, int] = {}
    for b in bitstrings:
        counts[b] = counts.get(b, 0) + 1
    records = [SampleRecord(b, float(energy_of(b)), c) for b, c in counts.items()]
    records.sort(key=lambda r: (r.energy, r.bits))
    return SampleSet(tuple(records), len(bitstrings), backend, seed)


def sample_indices(probabilities: np.ndarray, reads: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `reads` state indices from a probability vector (inverse CDF)."""
    cdf = np.cumsum(probabilities)
    cdf /= cdf[-1]
    u = rng.random(reads)
    return np.minimum(np.searchsorted(cdf, u, side="right"), probabilities.size - 1)
