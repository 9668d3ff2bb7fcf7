"""Exact state-vector simulation of the annealing Hamiltonian

    H(t) = A(s(t)) * H0 + B(s(t)) * H1,

with H0 = -sum_i sigma_x^(i) (uniform transverse field) and H1 the diagonal
problem Hamiltonian.  Integration uses Strang splitting: the diagonal factor
is applied exactly as a phase, the transverse factor exactly as a product of
single-qubit rotations, so every step is unitary by construction and norm is
conserved to rounding error.  Accuracy in the continuum limit is second order
in the step size; the acceptance suite pins it with a step-halving check.

Amplitude index k encodes the bitstring with variable 0 as the most
significant bit, matching the enumeration convention in `exact`.

By default the driver rescales the problem couplings by their largest
magnitude before evolving (`auto_scale`), mirroring how annealing hardware
maps h/J onto its fixed analog range.  Sample energies always come from the
unscaled model.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import AccuracyError, DataError, SizeError
from .exact import all_state_energies, bits_to_index, index_to_bits
from .knapsack import IsingModel, QuboModel, as_bits, qubo_to_ising
from .samples import SampleSet, build_sampleset, sample_indices
from .schedules import REVERSE, AnnealSchedule, make_forward, s_at_many

QUBIT_CAP = 24
NORM_TOL = 1e-6
DEFAULT_DT = 0.05

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


@dataclass(frozen=True)
class AmplitudeTable:
    """Tabulated (s, A, B) samples on a monotone grid over [0, 1]."""

    s: tuple[float, ...]
    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self) -> None:
        s = self.s
        if len(s) < 2 or len(self.a) != len(s) or len(self.b) != len(s):
            raise ValueError("amplitude table needs matching s/A/B columns, >= 2 rows")
        if s[0] != 0.0 or s[-1] != 1.0:
            raise ValueError("amplitude grid must span [0, 1]")
        if any(x >= y for x, y in zip(s, s[1:])):
            raise ValueError("amplitude grid must be strictly increasing in s")
        if any(x <= y for x, y in zip(self.a, self.a[1:])):
            raise ValueError("A(s) must be strictly decreasing")
        if any(x >= y for x, y in zip(self.b, self.b[1:])):
            raise ValueError("B(s) must be strictly increasing")
        if self.a[0] <= 0 or self.b[-1] <= 0:
            raise ValueError("need A(0) > 0 and B(1) > 0")


@dataclass(frozen=True)
class DriverSpec:
    """Amplitude family and scales of the annealing machine.

    The default family is linear: A = energy_scale*(1-s), B = energy_scale*s.
    time_scale converts schedule units to phase units.  auto_scale divides the
    problem couplings by max(|h|, |J|) during evolution, emulating the fixed
    analog coupling range of hardware.
    """

    energy_scale: float = 1.0
    time_scale: float = 1.0
    auto_scale: bool = True
    table: AmplitudeTable | None = None

    def __post_init__(self) -> None:
        if self.energy_scale <= 0 or self.time_scale <= 0:
            raise ValueError("energy_scale and time_scale must be positive")


def amplitudes(driver: DriverSpec, s: float) -> tuple[float, float]:
    """(A, B) at a schedule position s in [0, 1]."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s={s} outside [0, 1]")
    if driver.table is None:
        return driver.energy_scale * (1.0 - s), driver.energy_scale * s
    a = float(np.interp(s, driver.table.s, driver.table.a))
    b = float(np.interp(s, driver.table.s, driver.table.b))
    return driver.energy_scale * a, driver.energy_scale * b


def load_amplitude_table(path: str | Path) -> AmplitudeTable:
    """Read an "s,A,B" CSV into an amplitude table."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != ["s", "A", "B"]:
            raise DataError(f'{path}: expected header "s,A,B"')
        rows = [(float(r[0]), float(r[1]), float(r[2])) for r in reader if r]
    try:
        return AmplitudeTable(
            tuple(r[0] for r in rows), tuple(r[1] for r in rows), tuple(r[2] for r in rows)
        )
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


@dataclass
class StateVector:
    amplitudes: np.ndarray
    num_vars: int

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        p = np.abs(self.amplitudes) ** 2
        return p / p.sum()


def uniform_state(num_vars: int) -> StateVector:
    """Ground state of the transverse-field driver: the uniform superposition."""
    size = 1 << num_vars
    amp = np.full(size, 1.0 / math.sqrt(size), dtype=np.complex128)
    return StateVector(amp, num_vars)


def basis_state(bits: str | Sequence[int]) -> StateVector:
    x = as_bits(bits)
    size = 1 << len(x)
    amp = np.zeros(size, dtype=np.complex128)
    amp[bits_to_index(x)] = 1.0
    return StateVector(amp, len(x))


# --- split-step kernels -----------------------------------------------------
# psi is handled as a float64 view (re, im interleaved); elementwise updates
# only, so results do not depend on any threading or chunking choices.


def _diag_phase_py(psi_f: np.ndarray, diag: np.ndarray, theta: float) -> None:
    t = -theta * diag
    c = np.cos(t)
    s = np.sin(t)
    re = psi_f[0::2].copy()
    im = psi_f[1::2]
    psi_f[0::2] = c * re - s * im
    psi_f[1::2] = c * im + s * re


def _x_rotation_py(psi_f: np.ndarray, n_qubits: int, phi: float) -> None:
    c = math.cos(phi)
    s = math.sin(phi)
    view = psi_f.view(np.complex128)
    for q in range(n_qubits):
        stride = 1 << (n_qubits - 1 - q)
        shaped = view.reshape(-1, 2, stride)
        a = shaped[:, 0, :].copy()
        b = shaped[:, 1, :]
        shaped[:, 0, :] = c * a + 1j * (s * b)
        shaped[:, 1, :] = c * b + 1j * (s * a)


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _diag_phase(psi_f, diag, theta):  # pragma: no cover - compiled
        for k in range(diag.size):
            t = -theta * diag[k]
            c = math.cos(t)
            s = math.sin(t)
            re = psi_f[2 * k]
            im = psi_f[2 * k + 1]
            psi_f[2 * k] = c * re - s * im
            psi_f[2 * k + 1] = c * im + s * re

    @numba.njit(cache=True)
    def _x_rotation(psi_f, n_qubits, phi):  # pragma: no cover - compiled
        c = math.cos(phi)
        s = math.sin(phi)
        n_amp = psi_f.size >> 1
        for q in range(n_qubits):
            stride = 1 << (n_qubits - 1 - q)
            step = stride << 1
            for base in range(0, n_amp, step):
                lo = 2 * base
                hi = lo + 2 * stride
                for j in range(0, 2 * stride, 2):
                    re0 = psi_f[lo + j]
                    im0 = psi_f[lo + j + 1]
                    re1 = psi_f[hi + j]
                    im1 = psi_f[hi + j + 1]
                    psi_f[lo + j] = c * re0 - s * im1
                    psi_f[lo + j + 1] = c * im0 + s * re1
                    psi_f[hi + j] = c * re1 - s * im0
                    psi_f[hi + j + 1] = c * im1 + s * re0

else:  # pragma: no cover - numba is a declared dependency
    _diag_phase = _diag_phase_py
    _x_rotation = _x_rotation_py


def ising_diagonal(ising: IsingModel) -> np.ndarray:
    """Diagonal of the problem Hamiltonian over all states (offset excluded)."""
    n = ising.num_vars
    if n > QUBIT_CAP:
        raise SizeError(f"num_vars={n} exceeds the qubit cap {QUBIT_CAP}")
    size = 1 << n
    idx = np.arange(size, dtype=np.uint32)
    spins = [
        1.0 - 2.0 * ((idx >> np.uint32(n - 1 - u)) & np.uint32(1)).astype(np.float64)
        for u in range(n)
    ]
    e = np.zeros(size, dtype=np.float64)
    for i in sorted(ising.h):
        c = ising.h[i]
        if c:
            e += c * spins[i]
    for i, j in sorted(ising.J):
        c = ising.J[(i, j)]
        if c:
            e += c * (spins[i] * spins[j])
    return e


def coupling_scale(ising: IsingModel) -> float:
    """Largest coupling magnitude, the hardware analog-range normalizer."""
    mags = [abs(v) for v in ising.h.values()] + [abs(v) for v in ising.J.values()]
    g = max(mags, default=0.0)
    return g if g > 0 else 1.0


def _segment_steps(schedule: AnnealSchedule, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint times and widths of integration steps, laid per linear schedule
    segment so control points are never straddled."""
    mids: list[float] = []
    spans: list[float] = []
    for (t0, _), (t1, _) in zip(schedule.points, schedule.points[1:]):
        span = t1 - t0
        k = max(1, int(math.ceil(span / dt - 1e-12)))
        h = span / k
        mids.extend(t0 + (i + 0.5) * h for i in range(k))
        spans.extend([h] * k)
    return np.array(mids), np.array(spans)


def evolve(
    ising: IsingModel,
    schedule: AnnealSchedule,
    initial: StateVector,
    driver: DriverSpec = DriverSpec(),
    dt: float = DEFAULT_DT,
) -> StateVector:
    """Integrate the time-dependent Schrodinger equation under the schedule.

    Deterministic for fixed inputs and step size.  Raises AccuracyError if
    the final norm drifts by more than NORM_TOL (renormalized once after the
    check passes).
    """
    n = ising.num_vars
    if n > QUBIT_CAP:
        raise SizeError(f"num_vars={n} exceeds the qubit cap {QUBIT_CAP}")
    if initial.num_vars != n or initial.amplitudes.size != (1 << n):
        raise ValueError("initial state dimension does not match the model")
    if abs(initial.norm_sq() - 1.0) > NORM_TOL:
        raise ValueError("initial state must be normalized")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")

    diag = ising_diagonal(ising)
    center = 0.5 * (float(diag.min()) + float(diag.max()))
    diag = diag - center  # global phase only; keeps angles small
    if driver.auto_scale:
        diag = diag / coupling_scale(ising)

    t_mid, spans = _segment_steps(schedule, dt)
    s_vals = s_at_many(schedule, t_mid)
    ab = [amplitudes(driver, float(s)) for s in s_vals]
    phi = np.array([a for a, _ in ab]) * spans * driver.time_scale
    theta = np.array([b for _, b in ab]) * spans * driver.time_scale

    psi = np.array(initial.amplitudes, dtype=np.complex128, copy=True)
    psi_f = psi.view(np.float64)
    # Strang splitting with merged half-phases between consecutive steps
    _diag_phase(psi_f, diag, 0.5 * float(theta[0]))
    for k in range(len(t_mid)):
        _x_rotation(psi_f, n, float(phi[k]))
        if k + 1 < len(t_mid):
            _diag_phase(psi_f, diag, 0.5 * float(theta[k] + theta[k + 1]))
        else:
            _diag_phase(psi_f, diag, 0.5 * float(theta[k]))
    norm_sq = float(np.vdot(psi, psi).real)
    if abs(norm_sq - 1.0) > NORM_TOL:
        raise AccuracyError(
            f"norm drifted by {abs(norm_sq - 1.0):.3e} (> {NORM_TOL}); reduce dt"
        )
    psi /= math.sqrt(norm_sq)
    return StateVector(psi, n)


def sample_state(
    state: StateVector,
    model: QuboModel,
    reads: int,
    seed: int,
    backend: str = "statevector",
    energies: np.ndarray | None = None,
) -> SampleSet:
    """Draw `reads` measurements from the final squared-magnitude distribution."""
    if reads < 1:
        raise ValueError(f"reads must be >= 1, got {reads}")
    if energies is None:
        energies = all_state_energies(model)
    rng = np.random.default_rng(seed)
    idx = sample_indices(state.probabilities(), reads, rng)
    bitstrings = [index_to_bits(int(k), state.num_vars) for k in idx]
    lookup = {b: float(energies[bits_to_index(b)]) for b in set(bitstrings)}
    return build_sampleset(bitstrings, lookup.__getitem__, backend, seed)


def forward_state(
    model: QuboModel,
    total_time: float,
    driver: DriverSpec = DriverSpec(),
    dt: float = DEFAULT_DT,
) -> StateVector:
    """Evolve the driver ground state under a forward ramp of the given length."""
    ising = qubo_to_ising(model)
    return evolve(ising, make_forward(total_time), uniform_state(model.num_vars), driver, dt)


def reverse_state(
    model: QuboModel,
    initial_bits: str | Sequence[int],
    schedule: AnnealSchedule,
    driver: DriverSpec = DriverSpec(),
    dt: float = DEFAULT_DT,
) -> StateVector:
    """Evolve the classical state `initial_bits` under a reverse schedule."""
    if schedule.kind != REVERSE:
        raise ValueError(f"reverse annealing needs a reverse schedule, got {schedule.kind!r}")
    bits = as_bits(initial_bits, model.num_vars)
    ising = qubo_to_ising(model)
    return evolve(ising, schedule, basis_state(bits), driver, dt)


def forward_anneal(
    model: QuboModel,
    total_time: float,
    reads: int,
    driver: DriverSpec = DriverSpec(),
    seed: int = 0,
    dt: float = DEFAULT_DT,
) -> SampleSet:
    """One forward anneal: evolve from the uniform superposition, then sample."""
    state = forward_state(model, total_time, driver, dt)
    return sample_state(state, model, reads, seed)


def reverse_anneal(
    model: QuboModel,
    initial_bits: str | Sequence[int],
    schedule: AnnealSchedule,
    reads: int,
    driver: DriverSpec = DriverSpec(),
    seed: int = 0,
    dt: float = DEFAULT_DT,
) -> SampleSet:
    """One reverse anneal from a classical input state.

    Every read restarts from `initial_bits` (reinitialize semantics).  The
    evolution is deterministic, so one evolution followed by `reads`
    independent measurements is exactly equivalent to `reads` restarted
    evolutions; only the sampling consumes randomness.
    """
    state = reverse_state(model, initial_bits, schedule, driver, dt)
    return sample_state(state, model, reads, seed)
