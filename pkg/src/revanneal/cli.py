"""Command-line entry point.

Subcommands: gen (instance families), solve (one instance, one backend),
transfer (full campaign from a config file), sweep (schedule grid search),
report (re-render tables and figures from stored records).

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical-accuracy
error.  REVANNEAL_OUT sets the default output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .campaign import (
    CampaignConfig,
    baseline_record_from_dict,
    emit_artifacts,
    load_config,
    run_campaign,
    transfer_record_from_dict,
    verify_manifest,
    write_json,
)
from .errors import AccuracyError, DataError
from .exact import solve_exact
from .experiments import (
    BackendOptions,
    default_sweep_grid,
    run_stats,
    schedule_sweep,
)
from .families import gen_family, gen_parent
from .knapsack import build_qubo, load_instance, save_instance
from .sa import SaParams, sa_forward, sa_reverse
from .schedules import REVERSE, format_schedule, make_forward, parse_schedule
from .seeding import derive_seed
from .statevector import DriverSpec, forward_anneal, reverse_anneal
from .version import __version__

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_ACCURACY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_out() -> Path:
    return Path(os.environ.get("REVANNEAL_OUT", "."))


def _build_parser() -> _Parser:
    parser = _Parser(prog="revanneal", description=__doc__)
    parser.add_argument("--version", action="version", version=f"revanneal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a parent instance and its 16 descendants")
    p_gen.add_argument("-n", "--items", type=int, required=True, help="number of items")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", type=Path, default=None, help="output directory")

    p_solve = sub.add_parser("solve", help="solve one instance with one backend")
    p_solve.add_argument("instance", type=Path)
    p_solve.add_argument(
        "--backend", choices=("exact", "statevector", "sa"), default="exact"
    )
    p_solve.add_argument("--runs", type=int, default=1)
    p_solve.add_argument("--reads", type=int, default=100)
    p_solve.add_argument(
        "--schedule",
        default=None,
        help='control points, e.g. "[(0.0, 1.0), (2.5, 0.5), (102.5, 0.5), (102.75, 1.0)]"',
    )
    p_solve.add_argument("--time", type=float, default=None, help="forward anneal duration")
    p_solve.add_argument(
        "--initial", default=None, help="input bitstring for reverse annealing"
    )
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--dt", type=float, default=0.05)
    p_solve.add_argument("--energy-scale", type=float, default=1.0)
    p_solve.add_argument("--time-scale", type=float, default=1.0)
    p_solve.add_argument("--no-auto-scale", action="store_true")
    p_solve.add_argument("--sweeps", type=int, default=1000)
    p_solve.add_argument("--beta-hot", type=float, default=0.01)
    p_solve.add_argument("--beta-cold", type=float, default=10.0)
    p_solve.add_argument("--out", type=Path, default=None, help="output file")

    p_transfer = sub.add_parser("transfer", help="run a full campaign from a config file")
    p_transfer.add_argument("--config", type=Path, required=True)
    p_transfer.add_argument("--out", type=Path, default=None, help="output directory")
    p_transfer.add_argument("--jobs", type=int, default=None, help="worker process cap")

    p_sweep = sub.add_parser("sweep", help="rank reverse schedules on one instance")
    p_sweep.add_argument("instance", type=Path)
    p_sweep.add_argument(
        "--backend", choices=("statevector", "sa"), default="statevector"
    )
    p_sweep.add_argument("--runs", type=int, default=10)
    p_sweep.add_argument("--reads", type=int, default=100)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--dt", type=float, default=0.05)
    p_sweep.add_argument("--sweeps", type=int, default=1000)
    p_sweep.add_argument("--out", type=Path, default=None, help="output file")

    p_report = sub.add_parser("report", help="re-render tables and figures from records")
    p_report.add_argument("--campaign", type=Path, required=True, help="campaign directory")
    p_report.add_argument("--verify", action="store_true", help="also check the manifest")

    return parser


def _cmd_gen(args: argparse.Namespace) -> int:
    try:
        parent = gen_parent(args.items, args.seed)
    except ValueError as exc:
        print(f"revanneal gen: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or _default_out()
    out.mkdir(parents=True, exist_ok=True)
    family = gen_family(parent)
    names = [parent.name] + [d.name for d in family]
    for inst in (parent, *family):
        save_instance(inst, out / f"{inst.name}.json")
    write_json(
        out / f"family_{parent.name}.json",
        {
            "parent": parent.name,
            "seed": args.seed,
            "instances": names,
            "files": [f"{name}.json" for name in names],
        },
    )
    print(f"wrote {len(names)} instances to {out}")
    return EXIT_OK


def _cmd_solve(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    model = build_qubo(instance)
    config_echo = {
        "instance": str(args.instance),
        "backend": args.backend,
        "runs": args.runs,
        "reads": args.reads,
        "schedule": args.schedule,
        "time": args.time,
        "initial": args.initial,
        "seed": args.seed,
        "dt": args.dt,
        "energy_scale": args.energy_scale,
        "time_scale": args.time_scale,
        "auto_scale": not args.no_auto_scale,
        "sweeps": args.sweeps,
        "beta_hot": args.beta_hot,
        "beta_cold": args.beta_cold,
    }
    out_file = args.out or (_default_out() / f"{instance.name}_{args.backend}.json")

    if args.backend == "exact":
        opt = solve_exact(instance)
        payload = {
            "instance": instance.name,
            "backend": "exact",
            "optimum": {
                "selection": opt.selection,
                "profit": opt.profit,
                "qubo_energy": opt.qubo_energy,
                "bits": opt.bits,
            },
            "config": config_echo,
        }
        write_json(Path(out_file), payload)
        print(f"optimum profit {opt.profit} (energy {opt.qubo_energy}) -> {out_file}")
        return EXIT_OK

    schedule = parse_schedule(args.schedule) if args.schedule else None
    reverse = schedule is not None and schedule.kind == REVERSE and args.initial is not None
    if schedule is not None and schedule.kind == REVERSE and args.initial is None:
        print(
            "revanneal solve: reverse schedule given without --initial; "
            "running forward anneal over the same duration",
            file=sys.stderr,
        )
    total_time = args.time if args.time is not None else (
        schedule.duration if schedule is not None else 102.75
    )

    driver = DriverSpec(
        energy_scale=args.energy_scale,
        time_scale=args.time_scale,
        auto_scale=not args.no_auto_scale,
    )
    run_payloads = []
    bests = []
    for run in range(args.runs):
        seed = derive_seed(args.seed, "solve", instance.name, run)
        if args.backend == "statevector":
            if reverse:
                ss = reverse_anneal(
                    model, args.initial, schedule, args.reads, driver, seed, args.dt
                )
            else:
                ss = forward_anneal(model, total_time, args.reads, driver, seed, args.dt)
        else:
            params = SaParams(
                sweeps=args.sweeps,
                beta_hot=args.beta_hot,
                beta_cold=args.beta_cold,
                reads=args.reads,
                seed=seed,
            )
            if reverse:
                ss = sa_reverse(model, args.initial, schedule, params)
            else:
                ss = sa_forward(model, params)
        run_payloads.append(ss.to_dict())
        bests.append(ss.best.energy)
    best, avg, std = run_stats(bests)
    payload = {
        "instance": instance.name,
        "backend": args.backend,
        "mode": "reverse" if reverse else "forward",
        "total_time": None if reverse else total_time,
        "schedule": format_schedule(schedule) if schedule else format_schedule(
            make_forward(total_time)
        ),
        "runs": run_payloads,
        "stats": {"best": best, "avg": avg, "std": std},
        "config": config_echo,
    }
    write_json(Path(out_file), payload)
    print(f"best {best}, avg {avg:.3f}, std {std:.3f} over {args.runs} runs -> {out_file}")
    return EXIT_OK


def _cmd_transfer(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.jobs is not None:
        config = CampaignConfig(**{**config.to_dict(), "jobs": args.jobs})
    out_dir = args.out or (Path(config.out_dir) if config.out_dir else _default_out() / "campaign")
    result = run_campaign(config, out_dir)
    print(f"campaign complete: {len(result.files)} artifacts in {result.out_dir}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    options = BackendOptions(dt=args.dt, sweeps=args.sweeps)
    ranking, excluded = schedule_sweep(
        instance,
        default_sweep_grid(),
        args.runs,
        args.reads,
        args.backend,
        args.seed,
        options,
    )
    payload = {
        "instance": instance.name,
        "backend": args.backend,
        "runs": args.runs,
        "reads": args.reads,
        "seed": args.seed,
        "ranking": [
            {"schedule": e.schedule, "mean_best": e.mean_best, "std_best": e.std_best}
            for e in ranking
        ],
        "excluded": [{"schedule": s, "reason": r} for s, r in excluded],
    }
    out_file = args.out or (_default_out() / f"sweep_{instance.name}.json")
    write_json(Path(out_file), payload)
    top = ranking[0]
    print(f"best schedule {top.schedule} (mean best {top.mean_best:.3f}) -> {out_file}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    out = args.campaign
    baseline_path = out / "baseline.json"
    if not baseline_path.exists():
        raise DataError(f"{baseline_path} not found; is {out} a campaign directory?")
    baseline = [
        baseline_record_from_dict(d)
        for d in json.loads(baseline_path.read_text())["records"]
    ]
    transfers = {}
    for path in sorted(out.glob("transfer_*.json")):
        records = [
            transfer_record_from_dict(d) for d in json.loads(path.read_text())["records"]
        ]
        transfers[path.stem.removeprefix("transfer_")] = records
    files = emit_artifacts(out, baseline, transfers)
    print(f"re-rendered {len(files)} artifacts in {out}")
    if args.verify:
        problems = verify_manifest(out)
        if problems:
            for p in problems:
                print(f"manifest: {p}", file=sys.stderr)
            return EXIT_DATA
        print("manifest verified")
    return EXIT_OK


_HANDLERS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "transfer": _cmd_transfer,
    "sweep": _cmd_sweep,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except AccuracyError as exc:
        print(f"revanneal {args.command}: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except (DataError, FileNotFoundError, ValueError, IndexError) as exc:
        print(f"revanneal {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
