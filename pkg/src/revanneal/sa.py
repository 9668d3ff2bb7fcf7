"""Classical Metropolis sampler over QUBO bitstrings.

Shares the SampleSet contract with the statevector backend, so experiments
can swap backends freely.  Forward runs ramp the inverse temperature
geometrically from hot to cold; reverse runs map the annealing schedule onto
inverse temperature linearly in s (s = 1 is cold), so the dip heats the chain
and the pause becomes an equilibration plateau.

Reads are independent chains with per-read derived seeds, so parallel and
serial execution produce identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .knapsack import QuboModel, as_bits, bits_to_str, energy
from .samples import SampleSet, build_sampleset
from .schedules import REVERSE, AnnealSchedule, s_at_many
from .seeding import derive_seed

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


@dataclass(frozen=True)
class SaParams:
    sweeps: int = 1000
    beta_hot: float = 0.01
    beta_cold: float = 10.0
    reads: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if not 0 < self.beta_hot < self.beta_cold:
            raise ValueError("need beta_cold > beta_hot > 0")
        if self.reads < 1:
            raise ValueError("reads must be >= 1")


def _dense(model: QuboModel) -> tuple[np.ndarray, np.ndarray]:
    """Linear vector and symmetric coupling matrix (zero diagonal)."""
    n = model.num_vars
    lin = np.zeros(n, dtype=np.float64)
    for i, c in model.linear.items():
        lin[i] = c
    q = np.zeros((n, n), dtype=np.float64)
    for (i, j), c in model.quadratic.items():
        q[i, j] += c
        q[j, i] += c
    return lin, q


def _metropolis_py(lin, q, x, flips, unifs, betas):
    n = x.size
    field = q @ x.astype(np.float64)
    m = 0
    for sweep in range(betas.size):
        beta = betas[sweep]
        for _ in range(n):
            i = flips[m]
            u = unifs[m]
            m += 1
            delta_e = (1.0 - 2.0 * x[i]) * (lin[i] + field[i])
            if delta_e <= 0.0 or u < math.exp(-beta * delta_e):
                sign = 1.0 - 2.0 * x[i]
                x[i] = 1 - x[i]
                field += sign * q[:, i]
    return x


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _metropolis(lin, q, x, flips, unifs, betas):  # pragma: no cover - compiled
        n = x.size
        field = np.zeros(n, dtype=np.float64)
        for i in range(n):
            if x[i]:
                for j in range(n):
                    field[j] += q[j, i]
        m = 0
        for sweep in range(betas.size):
            beta = betas[sweep]
            for _ in range(n):
                i = flips[m]
                u = unifs[m]
                m += 1
                delta_e = (1.0 - 2.0 * x[i]) * (lin[i] + field[i])
                if delta_e <= 0.0 or u < math.exp(-beta * delta_e):
                    sign = 1.0 - 2.0 * x[i]
                    x[i] = 1 - x[i]
                    for j in range(n):
                        field[j] += sign * q[j, i]
        return x

else:  # pragma: no cover - numba is a declared dependency
    _metropolis = _metropolis_py


def _run_reads(
    model: QuboModel,
    params: SaParams,
    betas: np.ndarray,
    label: str,
    initial: tuple[int, ...] | None,
) -> SampleSet:
    lin, q = _dense(model)
    n = model.num_vars
    finals: list[str] = []
    for read in range(params.reads):
        rng = np.random.default_rng(derive_seed(params.seed, label, read))
        if initial is None:
            x = rng.integers(0, 2, size=n).astype(np.int8)
        else:
            x = np.array(initial, dtype=np.int8)
        flips = rng.integers(0, n, size=params.sweeps * n)
        unifs = rng.random(params.sweeps * n)
        x = _metropolis(lin, q, x, flips, unifs, betas)
        finals.append(bits_to_str(x))
    return build_sampleset(finals, lambda b: energy(model, b), "sa", params.seed)


def sa_forward(model: QuboModel, params: SaParams) -> SampleSet:
    """Per read: random start, geometric beta ramp hot -> cold, Metropolis
    single-bit flips, final state recorded."""
    betas = np.geomspace(params.beta_hot, params.beta_cold, params.sweeps)
    return _run_reads(model, params, betas, "sa-forward", None)


def sa_reverse(
    model: QuboModel,
    initial_bits: str | Sequence[int],
    schedule: AnnealSchedule,
    params: SaParams,
) -> SampleSet:
    """Per read: start from the input state and follow beta(t) =
    beta_hot + (beta_cold - beta_hot) * s(t) sampled at sweep midpoints."""
    if schedule.kind != REVERSE:
        raise ValueError(f"reverse run needs a reverse schedule, got {schedule.kind!r}")
    bits = as_bits(initial_bits, model.num_vars)
    t = (np.arange(params.sweeps) + 0.5) * (schedule.duration / params.sweeps)
    betas = params.beta_hot + (params.beta_cold - params.beta_hot) * s_at_many(schedule, t)
    return _run_reads(model, params, betas, "sa-reverse", bits)
