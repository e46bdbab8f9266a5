"""
ABC Consistency Toolkit - command-line entry point

Runs the named experiments (or experiment files) and writes CSV/JSON data
plus a manifest into one directory per run.

Subcommands:
- abc run               Rejection or kernel ABC over sample sizes and statistic sets
- diagnose augment      Nested statistic sets with jump detection
- diagnose injectivity  Analytic and simulated one-to-one checks of a binding function
- analytic sweep        Sequential limits of the Gaussian-mean tail probability
- lv-study              Lotka-Volterra posterior under one simulation scheme

Exit codes: 0 success, 2 configuration error, 3 runtime or model error.
"""

import argparse
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from experiments import load_experiment_config, run_experiment
from utils import AbcToolkitError, ConfigError, load_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

LV_EXPERIMENTS = {"deterministic": "lv-deterministic", "noise_matched": "lv-noise-matched"}

_handlers: List[logging.Handler] = []


def configure_logging(level_override: Optional[str] = None) -> None:
    """
    Attach console and rotating-file handlers to the root logger.

    Handlers from a previous call are replaced, so repeated ``main`` calls in
    one process do not duplicate output.
    """
    logging_config = load_config().get_logging_config()
    level = getattr(logging, (level_override or logging_config['level']).upper(), logging.INFO)
    formatter = logging.Formatter(logging_config['format'])
    root = logging.getLogger()

    for handler in _handlers:
        root.removeHandler(handler)
        handler.close()
    _handlers.clear()

    if logging_config['console']:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        _handlers.append(console_handler)
    if logging_config['file_logging']:
        file_handler = RotatingFileHandler(
            logging_config['file'],
            maxBytes=logging_config['max_bytes'],
            backupCount=logging_config['backup_count']
        )
        file_handler.setFormatter(formatter)
        _handlers.append(file_handler)

    for handler in _handlers:
        handler.setLevel(level)
        root.addHandler(handler)
    root.setLevel(level)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Experiment file (YAML or JSON)")
    parser.add_argument("--experiment", help="Named experiment preset from config.yaml")
    parser.add_argument("--seed", type=int, help="Run seed (required unless set in the experiment file)")
    parser.add_argument("--workers", type=int, help="joblib workers; results do not depend on it")
    parser.add_argument("--out", help="Output directory (default runs/<experiment>)")


def _csv_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abc-toolkit", description="ABC consistency experiments")
    commands = parser.add_subparsers(dest="command", required=True)

    abc = commands.add_parser("abc", help="ABC sampling runs")
    abc_commands = abc.add_subparsers(dest="action", required=True)
    abc_run = abc_commands.add_parser("run", help="Rejection or kernel ABC at every sample size")
    _add_common_flags(abc_run)
    abc_run.add_argument("--stats", type=_csv_list, help="Comma-separated statistic set names")
    abc_run.add_argument("--sizes", type=lambda v: [int(t) for t in _csv_list(v)], help="Comma-separated sample sizes")
    abc_run.add_argument("--n-draws", type=int, dest="n_draws")

    diagnose = commands.add_parser("diagnose", help="Consistency diagnostics")
    diagnose_commands = diagnose.add_subparsers(dest="action", required=True)
    augment = diagnose_commands.add_parser("augment", help="Statistic augmentation sequence")
    _add_common_flags(augment)
    augment.add_argument("--plan", help="Plan preset: moments-ladder, lags-ladder or lags-third-ladder")
    augment.add_argument("--threshold", type=float, help="Jump threshold in pooled std units")
    augment.add_argument("--n-draws", type=int, dest="n_draws")
    injectivity = diagnose_commands.add_parser("injectivity", help="One-to-one check of a binding function")
    _add_common_flags(injectivity)
    injectivity.add_argument("--model", help="ar1 or ma2")
    injectivity.add_argument("--stats", help="Statistic set name")
    injectivity.add_argument("--verify-points", type=int, dest="verify_points",
                             help="Grid points per dimension for simulated verification (0 skips it)")
    injectivity.add_argument("--t-star", type=int, dest="t_star", help="Series length of the simulated check")

    analytic = commands.add_parser("analytic", help="Closed-form Gaussian-mean example")
    analytic_commands = analytic.add_subparsers(dest="action", required=True)
    sweep = analytic_commands.add_parser("sweep", help="Both limit orders of the tail probability")
    _add_common_flags(sweep)
    sweep.add_argument("--eta-mode", choices=("simulated", "fixed"), dest="eta_mode")

    lv = commands.add_parser("lv-study", help="Lotka-Volterra simulation schemes")
    _add_common_flags(lv)
    lv.add_argument("--mode", choices=("deterministic", "noise_matched", "noise-matched"))
    lv.add_argument("--n-draws", type=int, dest="n_draws")
    return parser


def resolve_request(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Map parsed arguments onto (runner, preset name, flag overrides).

    Subcommand-specific flags pick a default preset when --experiment is
    absent: the plan name, ``<model>-<stats>``, ``gauss-limits``, or the LV mode.
    """
    flags: Dict[str, Any] = {"seed": args.seed, "workers": args.workers, "out": args.out}
    experiment = args.experiment
    if args.command == "abc":
        command = "abc"
        flags.update({"statistic_sets": args.stats, "sizes": args.sizes, "n_draws": args.n_draws})
    elif args.command == "diagnose" and args.action == "augment":
        command = "augment"
        experiment = experiment or args.plan
        flags.update({"plan": args.plan, "threshold": args.threshold, "n_draws": args.n_draws})
    elif args.command == "diagnose":
        command = "injectivity"
        if not experiment and args.model and args.stats:
            experiment = f"{args.model}-{args.stats}"
        flags.update({
            "model": args.model,
            "statistic_sets": [args.stats] if args.stats else None,
            "verify_points": args.verify_points,
            "t_star": args.t_star,
        })
    elif args.command == "analytic":
        command = "sweep"
        if not experiment and not args.config:
            experiment = "gauss-limits"
        flags["eta_mode"] = args.eta_mode
    else:
        command = "lv"
        mode = args.mode.replace("-", "_") if args.mode else None
        if not experiment and not args.config and mode:
            experiment = LV_EXPERIMENTS[mode]
        flags.update({"mode": mode, "n_draws": args.n_draws})

    workers_env = os.getenv("ABC_WORKERS")
    if flags["workers"] is None and workers_env:
        try:
            flags["workers"] = int(workers_env)
        except ValueError:
            raise ConfigError(f"ABC_WORKERS must be an integer, got {workers_env!r}", field="workers") from None
    return {"command": command, "experiment": experiment, "path": args.config, "overrides": flags}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one experiment and return the exit code.

    Example:
        >>> main(["analytic", "sweep", "--seed", "3", "--out", "runs/gauss-limits"])
        0
    """
    args = build_parser().parse_args(argv)
    load_dotenv()
    configure_logging(os.getenv("ABC_LOG_LEVEL"))

    try:
        request = resolve_request(args)
        cfg = load_experiment_config(**request)
        manifest = run_experiment(cfg)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except AbcToolkitError as e:
        logger.error(f"Run failed: {e}")
        print(f"Run failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    logger.info(
        f"Experiment '{manifest.experiment}' done in {manifest.runtime_seconds:.1f}s, "
        f"{len(manifest.outputs)} files in {cfg.out}"
    )
    print(f"{manifest.experiment}: {len(manifest.outputs)} files written to {cfg.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
