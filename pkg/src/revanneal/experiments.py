"""Campaign orchestration: forward-anneal baselines over instance families,
reverse-anneal transfer runs seeded with foreign solutions, and schedule sweeps.

Per-run statistic is the minimum energy among that run's reads.  Aggregates
(best/avg/std) are computed over the per-run bests, std with the population
convention.  Every run seed is derived from the master seed and the task
labels, so campaigns are reproducible and order-independent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import RevannealError
from .exact import ClosenessReport, all_state_energies, closeness_report
from .knapsack import KnapsackInstance, QuboModel, build_qubo
from .sa import SaParams, sa_forward, sa_reverse
from .samples import SampleSet
from .schedules import AnnealSchedule, format_schedule, make_reverse, validate
from .seeding import derive_seed
from .statevector import (
    DEFAULT_DT,
    DriverSpec,
    forward_state,
    reverse_state,
    sample_state,
)

BACKENDS = ("statevector", "sa")
CONTROL_LABEL = "--"


@dataclass(frozen=True)
class BackendOptions:
    """Numerical knobs of the sampler backends; reads/seeds come per task."""

    driver: DriverSpec = DriverSpec()
    dt: float = DEFAULT_DT
    sweeps: int = 1000
    beta_hot: float = 0.01
    beta_cold: float = 10.0


@dataclass(frozen=True)
class BaselineRecord:
    instance: str
    item_count: int
    best_energy: float
    best_bits: str
    run_bests: tuple[float, ...]
    run_best_bits: tuple[str, ...]
    closeness: ClosenessReport | None = None
    error: str | None = None


@dataclass(frozen=True)
class TransferRecord:
    source: str
    target: str
    run_bests: tuple[float, ...]
    best: float | None
    avg: float | None
    std: float | None
    schedule: str
    backend: str
    master_seed: int
    skipped: bool = False
    reason: str | None = None


@dataclass(frozen=True)
class SweepEntry:
    schedule: str
    mean_best: float
    std_best: float


def run_stats(values: Sequence[float]) -> tuple[float, float, float]:
    """(best, average, population standard deviation) of per-run bests."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("need at least one value")
    return float(arr.min()), float(arr.mean()), float(arr.std())


class _Sampler:
    """Uniform run interface over the two backends.  For the statevector the
    evolution is cached per (model, schedule) since only sampling varies
    between runs."""

    def __init__(self, backend: str, options: BackendOptions):
        if backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
        self.backend = backend
        self.options = options

    def forward_runs(
        self, model: QuboModel, total_time: float, runs: int, reads: int, seeds: list[int]
    ) -> list[SampleSet]:
        if self.backend == "statevector":
            state = forward_state(model, total_time, self.options.driver, self.options.dt)
            energies = all_state_energies(model)
            return [
                sample_state(state, model, reads, seed, energies=energies) for seed in seeds
            ]
        return [
            sa_forward(model, self._sa_params(reads, seed)) for seed in seeds
        ]

    def reverse_runs(
        self,
        model: QuboModel,
        initial_bits: str,
        schedule: AnnealSchedule,
        runs: int,
        reads: int,
        seeds: list[int],
    ) -> list[SampleSet]:
        if self.backend == "statevector":
            state = reverse_state(
                model, initial_bits, schedule, self.options.driver, self.options.dt
            )
            energies = all_state_energies(model)
            return [
                sample_state(state, model, reads, seed, energies=energies) for seed in seeds
            ]
        return [
            sa_reverse(model, initial_bits, schedule, self._sa_params(reads, seed))
            for seed in seeds
        ]

    def _sa_params(self, reads: int, seed: int) -> SaParams:
        opt = self.options
        return SaParams(
            sweeps=opt.sweeps,
            beta_hot=opt.beta_hot,
            beta_cold=opt.beta_cold,
            reads=reads,
            seed=seed,
        )


def _best_of_runs(samplesets: list[SampleSet]) -> tuple[tuple[float, ...], tuple[str, ...]]:
    bests = tuple(ss.best.energy for ss in samplesets)
    bits = tuple(ss.best.bits for ss in samplesets)
    return bests, bits


def run_baseline(
    instances: Sequence[KnapsackInstance],
    backend: str,
    runs: int,
    reads: int,
    total_time: float,
    master_seed: int,
    options: BackendOptions = BackendOptions(),
) -> list[BaselineRecord]:
    """Forward-anneal every instance `runs` times; descendants get a closeness
    report against their parent's baseline best.

    total_time must equal the duration of the transfer schedule so that every
    run in a campaign accesses the sampler for the same amount of time.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    sampler = _Sampler(backend, options)
    by_name = {inst.name: inst for inst in instances}
    records: dict[str, BaselineRecord] = {}
    models: dict[str, QuboModel] = {}

    for inst in instances:
        seeds = [derive_seed(master_seed, "baseline", inst.name, r) for r in range(runs)]
        try:
            model = build_qubo(inst)
            models[inst.name] = model
            sets = sampler.forward_runs(model, total_time, runs, reads, seeds)
        except RevannealError as exc:
            records[inst.name] = BaselineRecord(
                instance=inst.name,
                item_count=inst.n,
                best_energy=float("nan"),
                best_bits="",
                run_bests=(),
                run_best_bits=(),
                error=str(exc),
            )
            continue
        run_bests, run_bits = _best_of_runs(sets)
        best_idx = int(np.argmin(run_bests))
        records[inst.name] = BaselineRecord(
            instance=inst.name,
            item_count=inst.n,
            best_energy=run_bests[best_idx],
            best_bits=run_bits[best_idx],
            run_bests=run_bests,
            run_best_bits=run_bits,
        )

    # closeness of each descendant vs its parent's baseline best
    out: list[BaselineRecord] = []
    for inst in instances:
        rec = records[inst.name]
        parent_name = inst.lineage.parent if inst.lineage else None
        if (
            rec.error is None
            and parent_name is not None
            and parent_name in records
            and records[parent_name].error is None
        ):
            parent_rec = records[parent_name]
            parent_model = models[parent_name]
            try:
                rec = replace(
                    rec,
                    closeness=closeness_report(
                        parent_model, rec.best_bits, parent_rec.best_bits, parent_rec.best_energy
                    ),
                )
            except ValueError as exc:
                warnings.warn(f"{inst.name}: no closeness report ({exc})", stacklevel=2)
        out.append(rec)
    return out


def run_transfer(
    target: KnapsackInstance,
    sources: Sequence[tuple[str, str]],
    schedule: AnnealSchedule,
    backend: str,
    runs: int,
    reads: int,
    master_seed: int,
    options: BackendOptions = BackendOptions(),
) -> list[TransferRecord]:
    """Reverse-anneal the target once per source solution, plus a forward
    control run (source label "--") over the same schedule duration."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    sampler = _Sampler(backend, options)
    model = build_qubo(target)
    sched_text = format_schedule(schedule)

    def record(source: str, sets: list[SampleSet]) -> TransferRecord:
        run_bests, _ = _best_of_runs(sets)
        best, avg, std = run_stats(run_bests)
        return TransferRecord(
            source=source,
            target=target.name,
            run_bests=run_bests,
            best=best,
            avg=avg,
            std=std,
            schedule=sched_text,
            backend=backend,
            master_seed=master_seed,
        )

    control_seeds = [
        derive_seed(master_seed, "transfer-control", target.name, r) for r in range(runs)
    ]
    results = [
        record(
            CONTROL_LABEL,
            sampler.forward_runs(model, schedule.duration, runs, reads, control_seeds),
        )
    ]

    for source_name, source_bits in sources:
        if len(source_bits) != model.num_vars:
            results.append(
                TransferRecord(
                    source=source_name,
                    target=target.name,
                    run_bests=(),
                    best=None,
                    avg=None,
                    std=None,
                    schedule=sched_text,
                    backend=backend,
                    master_seed=master_seed,
                    skipped=True,
                    reason=(
                        f"source has {len(source_bits)} bits, target model expects "
                        f"{model.num_vars}"
                    ),
                )
            )
            continue
        seeds = [
            derive_seed(master_seed, "transfer", target.name, source_name, r)
            for r in range(runs)
        ]
        sets = sampler.reverse_runs(model, source_bits, schedule, runs, reads, seeds)
        results.append(record(source_name, sets))
    return results


def default_sweep_grid() -> list[AnnealSchedule]:
    """25 reverse schedules bracketing the lab-tuned shape: dip depth and
    pause length vary, ramp and quench stay fixed."""
    grid = []
    for s_p in (0.3, 0.4, 0.5, 0.6, 0.7):
        for t_pause in (0.0, 25.0, 50.0, 75.0, 100.0):
            grid.append(make_reverse(s_p, 2.5, t_pause, 0.25))
    return grid


def schedule_sweep(
    target: KnapsackInstance,
    candidates: Sequence[AnnealSchedule],
    runs: int,
    reads: int,
    backend: str,
    master_seed: int,
    options: BackendOptions = BackendOptions(),
) -> tuple[list[SweepEntry], list[tuple[str, str]]]:
    """Rank candidate schedules by mean per-run best energy (ties by std).

    Each run starts from a seeded random bitstring shared across candidates so
    the comparison is paired.  Invalid candidates are excluded with a reason.
    Returns (ranking, excluded).
    """
    sampler = _Sampler(backend, options)
    model = build_qubo(target)
    excluded: list[tuple[str, str]] = []
    entries: list[SweepEntry] = []

    initials = []
    for r in range(runs):
        rng = np.random.default_rng(derive_seed(master_seed, "sweep-init", target.name, r))
        initials.append("".join(str(b) for b in rng.integers(0, 2, size=model.num_vars)))

    for cand in candidates:
        text = format_schedule(cand)
        problems = validate(cand)
        if problems:
            excluded.append((text, "; ".join(problems)))
            continue
        bests = []
        for r in range(runs):
            seed = derive_seed(master_seed, "sweep", target.name, text, r)
            sets = sampler.reverse_runs(model, initials[r], cand, 1, reads, [seed])
            bests.append(sets[0].best.energy)
        _, avg, std = run_stats(bests)
        entries.append(SweepEntry(schedule=text, mean_best=avg, std_best=std))

    entries.sort(key=lambda e: (e.mean_best, e.std_best, e.schedule))
    return entries, excluded
