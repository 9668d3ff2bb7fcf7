"""Campaign persistence: config files, result records, tables, figures and the
integrity manifest binding them together.

All numeric payloads are written deterministically (sorted keys, repr floats),
so rerunning a campaign with the same master seed reproduces every result file
byte for byte.  Timestamps live only in the manifest.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .errors import DataError
from .exact import ClosenessReport
from .experiments import (
    BackendOptions,
    BaselineRecord,
    TransferRecord,
    run_baseline,
    run_transfer,
)
from .families import DIRECTIONS
from .knapsack import KnapsackInstance, load_instance
from .reporting import (
    SORT_KEYS,
    boxplot_csv,
    boxplot_groups,
    correlation,
    emit_benchmark_table,
    emit_transfer_table,
    render_boxplots,
)
from .schedules import AnnealSchedule, parse_schedule
from .statevector import DriverSpec
from .version import __version__


@dataclass(frozen=True)
class CampaignConfig:
    backend: str
    runs: int
    reads: int
    schedule: str
    master_seed: int
    instance_dir: str
    out_dir: str | None = None
    dt: float = 0.05
    energy_scale: float = 1.0
    time_scale: float = 1.0
    auto_scale: bool = True
    sweeps: int = 1000
    beta_hot: float = 0.01
    beta_cold: float = 10.0
    jobs: int = 1

    def options(self) -> BackendOptions:
        return BackendOptions(
            driver=DriverSpec(
                energy_scale=self.energy_scale,
                time_scale=self.time_scale,
                auto_scale=self.auto_scale,
            ),
            dt=self.dt,
            sweeps=self.sweeps,
            beta_hot=self.beta_hot,
            beta_cold=self.beta_cold,
        )

    def parsed_schedule(self) -> AnnealSchedule:
        return parse_schedule(self.schedule)

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path: str | Path) -> CampaignConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from exc
    known = {f for f in CampaignConfig.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise DataError(f"{path}: unknown config keys {sorted(unknown)}")
    missing = {"backend", "runs", "reads", "schedule", "master_seed", "instance_dir"} - set(data)
    if missing:
        raise DataError(f"{path}: missing config keys {sorted(missing)}")
    try:
        return CampaignConfig(**data)
    except TypeError as exc:
        raise DataError(f"{path}: {exc}") from exc


def write_json(path: Path, payload: object) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _nan_to_none(x: float | None) -> float | None:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return x


def baseline_record_to_dict(rec: BaselineRecord) -> dict:
    d = asdict(rec)
    d["best_energy"] = _nan_to_none(rec.best_energy)
    d["run_bests"] = list(rec.run_bests)
    d["run_best_bits"] = list(rec.run_best_bits)
    return d


def baseline_record_from_dict(d: dict) -> BaselineRecord:
    closeness = d.get("closeness")
    return BaselineRecord(
        instance=d["instance"],
        item_count=int(d["item_count"]),
        best_energy=float("nan") if d["best_energy"] is None else float(d["best_energy"]),
        best_bits=d["best_bits"],
        run_bests=tuple(float(x) for x in d["run_bests"]),
        run_best_bits=tuple(d["run_best_bits"]),
        closeness=None if closeness is None else ClosenessReport(**closeness),
        error=d.get("error"),
    )


def transfer_record_to_dict(rec: TransferRecord) -> dict:
    d = asdict(rec)
    d["run_bests"] = list(rec.run_bests)
    return d


def transfer_record_from_dict(d: dict) -> TransferRecord:
    return TransferRecord(
        source=d["source"],
        target=d["target"],
        run_bests=tuple(float(x) for x in d["run_bests"]),
        best=d["best"],
        avg=d["avg"],
        std=d["std"],
        schedule=d["schedule"],
        backend=d["backend"],
        master_seed=int(d["master_seed"]),
        skipped=bool(d.get("skipped", False)),
        reason=d.get("reason"),
    )


def load_instances(instance_dir: str | Path) -> list[KnapsackInstance]:
    """Load every instance file in a directory (family manifests are skipped)
    and order parents before their descendants, descendants in the canonical
    fraction-then-direction order."""
    directory = Path(instance_dir)
    if not directory.is_dir():
        raise DataError(f"instance directory {directory} does not exist")
    instances = []
    for path in sorted(directory.glob("*.json")):
        if path.name.startswith("family_"):
            continue
        instances.append(load_instance(path))
    if not instances:
        raise DataError(f"no instance files found in {directory}")

    def sort_key(inst: KnapsackInstance):
        lin = inst.lineage
        if lin is None or lin.parent is None:
            return (inst.name, 0, 0.0, 0, "")
        return (
            lin.parent,
            1,
            lin.fraction or 0.0,
            DIRECTIONS.index(lin.category) if lin.category in DIRECTIONS else len(DIRECTIONS),
            inst.name,
        )

    return sorted(instances, key=sort_key)


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class CampaignResult:
    out_dir: Path
    baseline: list[BaselineRecord]
    transfers: dict[str, list[TransferRecord]]
    files: list[Path] = field(default_factory=list)


def _baseline_chunk(args: tuple) -> list[dict]:
    instance_dicts, backend, runs, reads, total_time, master_seed, config_dict = args
    cfg = CampaignConfig(**config_dict)
    instances = [KnapsackInstance.from_dict(d) for d in instance_dicts]
    records = run_baseline(
        instances, backend, runs, reads, total_time, master_seed, cfg.options()
    )
    return [baseline_record_to_dict(r) for r in records]


def run_campaign(config: CampaignConfig, out_dir: str | Path) -> CampaignResult:
    """Execute the full two-stage campaign and write every artifact.

    Stage one forward-anneals every instance (the benchmark baseline); stage
    two reverse-anneals each parent once per descendant best solution, with a
    forward control row.  Tables, boxplot data, figures, correlations and the
    integrity manifest are emitted under out_dir.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    schedule = config.parsed_schedule()
    options = config.options()
    instances = load_instances(config.instance_dir)

    if config.jobs > 1:
        # parallel baselines: parents must be in every chunk that contains one
        # of their descendants for closeness, so chunk by family
        families: dict[str, list[KnapsackInstance]] = {}
        for inst in instances:
            root = inst.lineage.parent if inst.lineage and inst.lineage.parent else inst.name
            families.setdefault(root, []).append(inst)
        tasks = [
            (
                [i.to_dict() for i in fam],
                config.backend,
                config.runs,
                config.reads,
                schedule.duration,
                config.master_seed,
                config.to_dict(),
            )
            for fam in families.values()
        ]
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            chunks = list(pool.map(_baseline_chunk, tasks))
        baseline = [baseline_record_from_dict(d) for chunk in chunks for d in chunk]
        order = {inst.name: k for k, inst in enumerate(instances)}
        baseline.sort(key=lambda r: order[r.instance])
    else:
        baseline = run_baseline(
            instances,
            config.backend,
            config.runs,
            config.reads,
            schedule.duration,
            config.master_seed,
            options,
        )
    base_by_name = {rec.instance: rec for rec in baseline}

    parents = [i for i in instances if not (i.lineage and i.lineage.parent)]
    transfers: dict[str, list[TransferRecord]] = {}
    for parent in parents:
        children = [
            i for i in instances if i.lineage and i.lineage.parent == parent.name
        ]
        sources = []
        for child in children:
            rec = base_by_name[child.name]
            if rec.error is None:
                sources.append((child.name, rec.best_bits))
        transfers[parent.name] = run_transfer(
            parent,
            sources,
            schedule,
            config.backend,
            config.runs,
            config.reads,
            config.master_seed,
            options,
        )

    result = CampaignResult(out_dir=out, baseline=baseline, transfers=transfers)
    config_echo = config.to_dict()

    write_json(
        out / "baseline.json",
        {"config": config_echo, "records": [baseline_record_to_dict(r) for r in baseline]},
    )
    result.files.append(out / "baseline.json")
    for parent_name, records in transfers.items():
        path = out / f"transfer_{parent_name}.json"
        write_json(
            path,
            {"config": config_echo, "records": [transfer_record_to_dict(r) for r in records]},
        )
        result.files.append(path)

    result.files.extend(emit_artifacts(out, baseline, transfers))
    write_manifest(out, config, result.files)
    return result


def emit_artifacts(
    out: Path,
    baseline: Sequence[BaselineRecord],
    transfers: dict[str, list[TransferRecord]],
) -> list[Path]:
    """Render tables, boxplot CSVs, figures and correlation reports."""
    files: list[Path] = []
    tables = out / "tables"
    plots = out / "plots"
    figures = out / "figures"
    for d in (tables, plots, figures):
        d.mkdir(parents=True, exist_ok=True)

    md, csv_text = emit_benchmark_table(baseline)
    (tables / "benchmark.md").write_text(md)
    (tables / "benchmark.csv").write_text(csv_text)
    files += [tables / "benchmark.md", tables / "benchmark.csv"]

    correlation_rows = []
    for parent_name, records in transfers.items():
        md, csv_text = emit_transfer_table(records)
        (tables / f"transfer_{parent_name}.md").write_text(md)
        (tables / f"transfer_{parent_name}.csv").write_text(csv_text)
        files += [tables / f"transfer_{parent_name}.md", tables / f"transfer_{parent_name}.csv"]

        for key in SORT_KEYS:
            groups = boxplot_groups(records, baseline, key)
            path = plots / f"boxplot_{parent_name}_{key}.csv"
            path.write_text(boxplot_csv(groups, key))
            files.append(path)
            fig_path = figures / f"boxplot_{parent_name}_{key}.png"
            render_boxplots(
                groups, fig_path, f"{parent_name}: transfer results by {key}", key
            )
            files.append(fig_path)

        try:
            for rep in correlation(records, baseline):
                correlation_rows.append(
                    {
                        "target": parent_name,
                        "metric": rep.metric,
                        "spearman_rho": rep.spearman_rho,
                        "sample_count": rep.sample_count,
                    }
                )
        except ValueError:
            pass

    write_json(out / "correlation.json", {"reports": correlation_rows})
    files.append(out / "correlation.json")
    lines = ["target,metric,spearman_rho,sample_count"]
    for row in correlation_rows:
        lines.append(
            f"{row['target']},{row['metric']},{row['spearman_rho']!r},{row['sample_count']}"
        )
    (out / "correlation.csv").write_text("\n".join(lines) + "\n")
    files.append(out / "correlation.csv")
    return files


def write_manifest(out: Path, config: CampaignConfig, files: Sequence[Path]) -> Path:
    manifest = {
        "tool": "revanneal",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "master_seed": config.master_seed,
        "config": config.to_dict(),
        "files": {
            str(p.relative_to(out)): sha256_file(p) for p in sorted(files, key=str)
        },
    }
    path = out / "manifest.json"
    write_json(path, manifest)
    return path


def verify_manifest(out_dir: str | Path) -> list[str]:
    """Check that every file listed in a campaign manifest exists and still
    hashes to its recorded digest.  Returns one message per problem."""
    out = Path(out_dir)
    path = out / "manifest.json"
    if not path.exists():
        return [f"{path} missing"]
    manifest = json.loads(path.read_text())
    problems = []
    for rel, digest in manifest.get("files", {}).items():
        target = out / rel
        if not target.exists():
            problems.append(f"{rel}: missing")
        elif sha256_file(target) != digest:
            problems.append(f"{rel}: digest mismatch")
    return problems
