"""Command-line surface: config parsing, the run/check/selftest subcommands,
and CSV/manifest serialization.

Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .errors import ConfigError
from .experiment import (
    DistributionRun,
    ExperimentConfig,
    SummaryRow,
    TrialResult,
    run_suite,
    table1_distributions,
    table2_distributions,
)
from .schedule import build_linear, retention
from .selftest import run_selftest

EXPERIMENTS = ("table1", "table2", "single")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the contract here is 1
    def error(self, message):
        raise _UsageError(message)


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Resolve a config from an optional JSON file plus flag overrides.

    Flags win over file values; anything unspecified falls back to the
    reference defaults baked into ExperimentConfig.
    """
    data: dict = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        try:
            data = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {p}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config root in {p} must be a JSON object")
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(data)


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".9g")
    return str(x)


def write_csv(
    trial_rows: list[tuple[str, str, TrialResult]],
    summary_rows: list[tuple[str, SummaryRow]],
    out_dir: str | Path,
) -> tuple[Path, Path]:
    """Write trials.csv and summary.csv; rows keep the caller's canonical
    (experiment, distribution, trial) order. Reals carry 9 significant digits."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trials_path = out / "trials.csv"
    summary_path = out / "summary.csv"
    with open(trials_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["experiment", "distribution", "trial", "seed",
                    "final_loss", "gen_error", "diverged"])
        for experiment, distribution, r in trial_rows:
            w.writerow([experiment, distribution, r.trial_index, r.seed_used,
                        _fmt(r.final_epoch_loss), _fmt(r.gen_error),
                        "true" if r.diverged else "false"])
    with open(summary_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["experiment", "distribution", "n_trials", "n_diverged",
                    "mean_error", "std_error"])
        for experiment, s in summary_rows:
            w.writerow([experiment, s.label, s.n_trials, s.n_diverged,
                        _fmt(s.mean_error), _fmt(s.std_error)])
    return trials_path, summary_path


def write_manifest(
    cfg: ExperimentConfig, out_dir: str | Path, wall_time: float, workers: int
) -> Path:
    manifest = {
        "config_echo": cfg.to_dict(),
        "artifact_version": __version__,
        "wall_time_seconds": wall_time,
        "worker_count": workers,
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _dump_weights(run: DistributionRun, path: str) -> None:
    if run.first_trial_params is None:
        raise ConfigError("cannot dump weights: trial 0 diverged during training")
    Path(path).write_text(json.dumps(list(run.first_trial_params.theta)) + "\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="ddpm1d", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    run = sub.add_parser("run", help="train and evaluate an experiment")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--experiment", choices=EXPERIMENTS, default="single")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int, help="base seed (config key base_seed)")
    run.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                     help="trial worker processes; never affects results")
    run.add_argument("--out", default="results", help="output directory")
    run.add_argument("--gens-per-trial", type=int)
    run.add_argument("--metric", choices=("mean_abs", "abs_mean"))
    run.add_argument("--normalize-mixture", action="store_true",
                     help="rescale mixture noise to unit variance")
    run.add_argument("--reverse-noise", choices=("same", "gaussian"),
                     help="distribution of reverse-step and init noise")
    run.add_argument("--sigma-mode", choices=("beta", "beta_tilde"))
    run.add_argument("--dump-weights", metavar="PATH",
                     help="write trial 0 weights of the first distribution as flat JSON")
    run.add_argument("--quiet", action="store_true", help="suppress per-trial progress")

    check = sub.add_parser("check", help="print schedule constants")
    check.add_argument("--config", help="JSON config file")
    check.add_argument("--beta-start", type=float)
    check.add_argument("--beta-end", type=float)
    check.add_argument("--steps", type=int)

    sub.add_parser("selftest", help="run built-in sampler/gradient/oracle checks")
    return parser


def _cmd_check(args) -> int:
    overrides = {"beta_start": args.beta_start, "beta_end": args.beta_end,
                 "steps": args.steps}
    cfg = parse_config(args.config, overrides)
    s = build_linear(cfg.beta_start, cfg.beta_end, cfg.steps)
    print(f"beta[1]    = {_fmt(s.beta_at(1))}")
    print(f"beta[{s.T}]  = {_fmt(s.beta_at(s.T))}")
    print(f"sqrt(alpha_bar[{s.T}]) = {_fmt(retention(s, s.T))}")
    return 0


def _cmd_selftest() -> int:
    checks = run_selftest()
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")
    return 0 if all(c.passed for c in checks) else 2


def _cmd_run(args) -> int:
    overrides = {
        "trials": args.trials,
        "base_seed": args.seed,
        "gens_per_trial": args.gens_per_trial,
        "error_metric": args.metric,
        "reverse_noise": args.reverse_noise,
        "sigma_mode": args.sigma_mode,
    }
    if args.normalize_mixture:
        overrides["normalize_mixture"] = True
    cfg = parse_config(args.config, overrides)
    if args.experiment == "table1":
        distributions = table1_distributions()
    elif args.experiment == "table2":
        distributions = table2_distributions(cfg.normalize_mixture)
    else:
        distributions = [(cfg.noise.label(), cfg.noise)]

    progress = None
    if not args.quiet:
        def progress(label: str, r: TrialResult) -> None:
            status = " DIVERGED" if r.diverged else ""
            print(
                f"[{label}] trial {r.trial_index}: loss={_fmt(r.final_epoch_loss)} "
                f"err={_fmt(r.gen_error)}{status}",
                file=sys.stderr,
            )

    start = time.perf_counter()
    runs = run_suite(cfg, distributions, workers=args.workers, on_result=progress)
    wall = time.perf_counter() - start

    trial_rows = [(args.experiment, run.label, r) for run in runs for r in run.results]
    summary_rows = [(args.experiment, run.summary) for run in runs]
    write_csv(trial_rows, summary_rows, args.out)
    write_manifest(cfg, args.out, wall, args.workers)
    if args.dump_weights:
        _dump_weights(runs[0], args.dump_weights)

    for _, s in summary_rows:
        div = f" diverged={s.n_diverged}" if s.n_diverged else ""
        print(f"{s.label}: mean_error={_fmt(s.mean_error)} "
              f"std={_fmt(s.std_error)} n={s.n_trials}{div}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "selftest":
            return _cmd_selftest()
        return _cmd_run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
