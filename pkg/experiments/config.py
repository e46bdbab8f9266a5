"""
Experiment configuration: a named preset from config.yaml, optionally
overridden by a YAML (or JSON) experiment file, overridden in turn by
command-line flags.
"""

import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import yaml

from abc_engine.config import AbcConfig
from abc_engine.distances import DISTANCE_KINDS
from series_models.models import MODEL_NAMES
from summaries.descriptors import named_statistic_set
from utils.config_loader import load_config
from utils.exceptions import ConfigError, DomainError

logger = logging.getLogger(__name__)

COMMANDS = ("abc", "augment", "injectivity", "sweep", "lv")
RAW_PATH = "raw_path"


@dataclass
class ExperimentConfig:
    """
    Everything one CLI run needs.

    Attributes:
        experiment: Preset name (also the default output folder)
        command: Which runner handles it: abc, augment, injectivity, sweep, lv
        seed: Run seed; mandatory
        out: Output directory
    """

    experiment: str
    command: str
    seed: int
    out: str = ""
    model: str = "ma2"
    theta0: Optional[List[float]] = None
    sizes: List[int] = field(default_factory=list)
    size: Optional[int] = None
    statistic_sets: List[str] = field(default_factory=list)
    distances: List[str] = field(default_factory=lambda: ["euclidean"])
    sampler: str = "rejection"
    n_draws: Optional[int] = None
    quantile: Optional[float] = None
    epsilon: Optional[float] = None
    workers: Optional[int] = None
    delta: Optional[float] = None
    plan: Optional[str] = None
    threshold: Optional[float] = None
    bounds: Optional[List[List[float]]] = None
    rho_min: Optional[float] = None
    tau: Optional[float] = None
    verify_points: int = 0
    verify_bounds: Optional[List[List[float]]] = None
    t_star: int = 1000000
    epsilon_grid: Optional[List[float]] = None
    size_grid: Optional[List[int]] = None
    eta_mode: str = "simulated"
    orders: List[str] = field(default_factory=lambda: ["eps_then_T", "T_then_eps"])
    mode: str = "noise_matched"
    n_points: Optional[int] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"Unknown command '{self.command}'", field="command")
        if self.seed is None:
            raise ConfigError("A seed is required (--seed or 'seed:' in the experiment file)", field="seed")
        try:
            self.seed = int(self.seed)
        except (TypeError, ValueError):
            raise ConfigError(f"Seed must be an integer, got {self.seed!r}", field="seed") from None
        if self.seed < 0:
            raise ConfigError(f"Seed must be non-negative, got {self.seed}", field="seed")
        if self.model not in MODEL_NAMES and self.model != "lv":
            raise ConfigError(f"Unknown model '{self.model}'", field="model")
        for name in self.statistic_sets:
            if name == RAW_PATH:
                continue
            try:
                named_statistic_set(name)
            except DomainError as e:
                raise ConfigError(str(e), field="statistic_sets") from None
        for kind in self.distances:
            if kind not in DISTANCE_KINDS:
                raise ConfigError(f"Unknown distance '{kind}'", field="distances")
        if self.quantile is not None and self.epsilon is not None and self.sampler != "kernel":
            raise ConfigError("Set either quantile or epsilon, not both", field="epsilon")
        if not self.out:
            self.out = str(Path("runs") / self.experiment)

    @property
    def run_sizes(self) -> List[int]:
        if self.sizes:
            return [int(t) for t in self.sizes]
        return [int(self.size)] if self.size is not None else []

    def abc_config(self, series_length: Optional[int] = None) -> AbcConfig:
        """AbcConfig from the run settings, defaults from config.yaml."""
        overrides: Dict[str, Any] = {"n_draws": self.n_draws, "workers": self.workers, "series_length": series_length}
        if self.epsilon is not None:
            overrides["epsilon"] = self.epsilon
        elif self.quantile is not None:
            overrides["quantile"] = self.quantile
        try:
            return AbcConfig.from_defaults(self.seed, **overrides)
        except DomainError as e:
            raise ConfigError(str(e), field="abc") from None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _field_names() -> set:
    return {f.name for f in fields(ExperimentConfig)}


def read_experiment_file(path: str) -> Dict[str, Any]:
    """
    Parse a YAML or JSON experiment file into a mapping.

    Raises:
        ConfigError: If the file is missing, unparsable (with line and column),
            or not a mapping
    """
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"Experiment file not found: {path}", field="config")
    try:
        with open(file_path, "r") as handle:
            data = yaml.safe_load(handle)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        column = mark.column + 1 if mark is not None else None
        problem = getattr(e, "problem", None) or str(e)
        logger.error(f"Cannot parse {path}: {problem}")
        raise ConfigError(f"Cannot parse {path}: {problem}", line=line, column=column) from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Experiment file {path} must hold a mapping, got {type(data).__name__}")
    return data


def load_experiment_config(
    command: str,
    experiment: Optional[str] = None,
    path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None
) -> ExperimentConfig:
    """
    Merge preset, experiment file and flags into an ExperimentConfig.

    Args:
        command: Runner the CLI subcommand maps to
        experiment: Preset name; the file's ``experiment`` key is used when None
        path: Experiment file (YAML or JSON)
        overrides: Flag values; None entries are ignored

    Raises:
        ConfigError: On parse errors, unknown presets or fields, a preset
            for another command, or a missing seed

    Example:
        >>> cfg = load_experiment_config("augment", "moments-ladder", overrides={"seed": 7})
        >>> cfg.statistic_sets
        ['eta1', 'eta2', 'eta3', 'eta4', 'eta5']
    """
    file_values = read_experiment_file(path) if path else {}
    flags = {k: v for k, v in (overrides or {}).items() if v is not None}
    name = flags.pop("experiment", None) or experiment or file_values.get("experiment")

    preset: Dict[str, Any] = {}
    if name:
        try:
            preset = load_config().get_experiment_preset(name)
        except KeyError:
            if not file_values and not flags.get("statistic_sets"):
                known = ", ".join(load_config().get_experiment_names())
                raise ConfigError(f"Unknown experiment '{name}' (known: {known})", field="experiment") from None
    merged = {**preset, **file_values, **flags}
    merged.setdefault("experiment", name or command)
    merged.setdefault("command", command)
    if merged["command"] != command:
        raise ConfigError(
            f"Experiment '{merged['experiment']}' is a '{merged['command']}' run, not '{command}'", field="command"
        )

    unknown = sorted(set(merged) - _field_names())
    if unknown:
        raise ConfigError(f"Unknown setting(s): {', '.join(unknown)}", field=unknown[0])
    if merged.get("seed") is None:
        raise ConfigError("A seed is required (--seed or 'seed:' in the experiment file)", field="seed")
    config = ExperimentConfig(**merged)
    logger.info(f"Experiment '{config.experiment}' ({config.command}), seed={config.seed}, out={config.out}")
    return config


def statistic_choice(name: str) -> Optional[str]:
    """Statistic argument of a sampler run: None for the raw-path distance."""
    return None if name == RAW_PATH else name


def parse_bounds(raw: Optional[Sequence[Sequence[float]]]):
    if raw is None:
        return None
    try:
        return tuple((float(lo), float(hi)) for lo, hi in raw)
    except (TypeError, ValueError):
        raise ConfigError(f"Bounds must be a list of [low, high] pairs, got {raw!r}", field="bounds") from None
