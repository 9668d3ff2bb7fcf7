"""Desk-scale reverse-annealing laboratory.

Knapsack instances are encoded as QUBO/Ising models with binary slack,
descendant families derive from parents by impact-ranked item substitution,
and two interchangeable sampler backends (exact statevector dynamics and a
classical Metropolis annealer) drive forward-baseline and reverse-transfer
experiment campaigns with exact oracles, tables, plots and a CLI on top.
"""

from .version import __version__

from .errors import AccuracyError, DataError, RevannealError, SizeError
from .exact import (
    ClosenessReport,
    GroundStates,
    Hamming,
    OptimalSolution,
    all_state_energies,
    cross_energy,
    hamming_decompose,
    qubo_ground_states,
    solve_exact,
)
from .experiments import (
    BackendOptions,
    BaselineRecord,
    TransferRecord,
    default_sweep_grid,
    run_baseline,
    run_stats,
    run_transfer,
    schedule_sweep,
)
from .families import (
    Category,
    ImpactTable,
    derive_descendant,
    gen_family,
    gen_parent,
    unique_items_with_impact,
)
from .knapsack import (
    IsingModel,
    Item,
    KnapsackInstance,
    Lineage,
    QuboModel,
    Selection,
    build_qubo,
    decode,
    energy,
    ising_energy,
    linear_impact,
    load_instance,
    qubo_to_ising,
    save_instance,
    slack_bit_count,
)
from .reporting import (
    CorrelationReport,
    boxplot_groups,
    correlation,
    emit_benchmark_table,
    emit_transfer_table,
    spearman,
)
from .sa import SaParams, sa_forward, sa_reverse
from .samples import SampleRecord, SampleSet
from .schedules import (
    AnnealSchedule,
    format_schedule,
    make_forward,
    make_reverse,
    parse_schedule,
    reverse_params,
    s_at,
    validate,
)
from .statevector import (
    DriverSpec,
    StateVector,
    amplitudes,
    basis_state,
    evolve,
    forward_anneal,
    load_amplitude_table,
    reverse_anneal,
    uniform_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]
