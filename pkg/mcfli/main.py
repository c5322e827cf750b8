"""Command-line entry point: ``python -m mcfli.main <subcommand>``."""
import argparse
import json
import logging
from pathlib import Path
import sys
from typing import Optional

from pydantic import ValidationError

from mcfli import config
from mcfli.core.grid import make_grid
from mcfli.core.layout import fermat_spiral_layout, subsample_layout
from mcfli.core.io import write_json
from mcfli.database import Base, engine
from mcfli.dependencies import db_session
from mcfli.exceptions import ConfigError, MCFLIError
from mcfli.harness.calibrate import run_calibration
from mcfli.harness.demo import run_imaging_demo
from mcfli.harness.ledger import list_runs
from mcfli.harness.rip import estimate_rip_constants
from mcfli.harness.sweep import run_sweep
from mcfli.harness.trial import run_trial
from mcfli.schemas.reports import TrialReportSchema
from mcfli.schemas.solver import SolverConfig
from mcfli.schemas.sweep import SweepSpec

logger = logging.getLogger("mcfli")


def _load_json(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _validate(model, data: dict):
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


def _emit(schema, out: Optional[str], name: str) -> None:
    if out:
        write_json(Path(out) / name, schema)
    print(schema.model_dump_json(indent=2))


def cmd_sweep(args) -> int:
    data = _load_json(args.config)
    overrides = {
        "K_values": args.K,
        "Q_values": args.Q,
        "visibility_targets": args.targets,
        "M_values": args.M,
        "trials": args.trials,
        "threshold_db": args.threshold,
        "solver": args.solver,
        "master_seed": args.seed,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.Q is not None:
        data.pop("visibility_targets", None)
    if args.targets is not None:
        data.pop("Q_values", None)
    if args.out:
        data["output_path"] = str(Path(args.out) / "sweep.csv")
    spec = _validate(SweepSpec, data)

    if args.no_db:
        result = run_sweep(spec, threads=args.threads)
    else:
        Base.metadata.create_all(bind=engine)
        with db_session() as db:
            result = run_sweep(spec, threads=args.threads, db=db)
    if not spec.output_path:
        sys.stdout.write(result.frame().to_csv(index=False, float_format="%.10g"))
    return 0


def cmd_trial(args) -> int:
    solver_config = _validate(SolverConfig, _load_json(args.config))
    seed = config.MASTER_SEED if args.seed is None else args.seed
    trial = run_trial(args.K, args.Q, args.M, seed, args.solver, make_grid(1, args.n1, 1.0),
                      solver_config, args.threshold)
    _emit(TrialReportSchema(**trial.__dict__), args.out, "trial.json")
    return 0


def cmd_rip(args) -> int:
    seed = config.MASTER_SEED if args.seed is None else args.seed
    estimate = estimate_rip_constants(args.K0, args.Q, args.M, args.trials, seed, make_grid(1, args.n1, 1.0))
    _emit(estimate.to_schema(), args.out, "rip.json")
    return 0


def cmd_demo(args) -> int:
    solver_config = _validate(SolverConfig, _load_json(args.config)) if args.config else None
    layout = fermat_spiral_layout(make_grid(2, args.n1, 1.0), args.cores)
    if args.subsample > 1:
        layout = subsample_layout(layout, args.subsample)
    seed = config.MASTER_SEED if args.seed is None else args.seed
    out = args.out or config.OUTPUT_DIR / "demo"
    report = run_imaging_demo(args.scene, layout, args.M, "tv", out, args.rho, solver_config, seed,
                              args.noise)
    print(report.to_schema().model_dump_json(indent=2))
    return 0


def cmd_calibrate(args) -> int:
    layout = fermat_spiral_layout(make_grid(2, args.n1, 1.0), args.cores)
    seed = config.MASTER_SEED if args.seed is None else args.seed
    report = run_calibration(layout, args.noise, args.perturbation, args.delta, args.sketches, seed,
                             out=args.out)
    print(report.model_dump_json(indent=2))
    return 0


def cmd_runs(args) -> int:
    Base.metadata.create_all(bind=engine)
    with db_session() as db:
        for run in list_runs(db, args.limit):
            print(f"{run.id:5d}  {run.created_at:%Y-%m-%d %H:%M:%S}  seed={run.master_seed}  "
                  f"solver={run.solver}  cells={len(run.cells)}  csv={run.csv_path or '-'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with sweep or solver settings")
    common.add_argument("--seed", type=int, help="master seed (default: MCFLI_SEED)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--log-level", default=config.LOG_LEVEL)

    parser = argparse.ArgumentParser(prog="mcfli", description="Multicore-fiber lensless imaging experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="phase-transition sweep, CSV output")
    p.add_argument("--threads", type=int, default=config.THREADS, help="worker threads for the trials")
    p.add_argument("--K", type=int, nargs="+")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--Q", type=int, nargs="+")
    group.add_argument("--targets", type=float, nargs="+", help="|V0| targets instead of Q values")
    p.add_argument("--M", type=int, nargs="+")
    p.add_argument("--trials", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--solver", choices=["lasso", "bpdn"])
    p.add_argument("--no-db", action="store_true", help="do not record the run in the ledger")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trial", parents=[common], help="single phase-transition trial")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--n1", type=int, default=256)
    p.add_argument("--solver", choices=["lasso", "bpdn"], default="lasso")
    p.add_argument("--threshold", type=float, default=config.SUCCESS_DB)
    p.set_defaults(func=cmd_trial)

    p = sub.add_parser("rip", parents=[common], help="empirical RIP constants")
    p.add_argument("--K0", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--n1", type=int, default=256)
    p.set_defaults(func=cmd_rip)

    p = sub.add_parser("demo", parents=[common], help="simulated 2-D imaging with TV reconstruction")
    p.add_argument("--scene", help="PGM image of the grid size (default: cartoon)")
    p.add_argument("--M", type=int, default=3000)
    p.add_argument("--n1", type=int, default=64)
    p.add_argument("--cores", type=int, default=110)
    p.add_argument("--subsample", type=int, default=1, help="keep every n-th core of the spiral")
    p.add_argument("--rho", type=float)
    p.add_argument("--noise", type=float, default=0.0)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("calibrate", parents=[common], help="simulated 8-step phase-shifting calibration")
    p.add_argument("--n1", type=int, default=64)
    p.add_argument("--cores", type=int, default=110)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--perturbation", choices=["none", "amplitude-ripple", "phase-aberration"], default="none")
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--sketches", type=int, default=20)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("runs", parents=[common], help="list recorded sweeps")
    p.add_argument("--limit", type=int, default=20)
    p.set_defaults(func=cmd_runs)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format=config.LOG_FORMAT, datefmt=config.LOG_DATE_FORMAT)
    try:
        return args.func(args)
    except MCFLIError as exc:
        logger.error("%s", exc.detail)
        print(f"error: {exc.detail}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
