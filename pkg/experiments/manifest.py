"""
Run manifests: what was run, with which versions, and checksums of every data file.
"""

import logging
import platform
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List

import joblib
import numpy as np
import pandas as pd
import scipy
import yaml

from utils import __version__
from utils.io_utils import file_checksum, write_csv, write_json_atomic

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def library_versions() -> Dict[str, str]:
    return {
        "abc_toolkit": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "joblib": joblib.__version__,
        "pyyaml": yaml.__version__,
    }


@dataclass
class RunManifest:
    """
    Record of one CLI run.

    Attributes:
        experiment: Experiment name
        command: Runner used
        config: Echo of the merged experiment configuration
        versions: Toolkit and library versions
        outputs: Data file name -> sha256
        runtime_seconds: Wall time of the run
        empty_posteriors: Labels of runs that accepted no draws
    """

    experiment: str
    command: str
    config: Dict[str, Any]
    versions: Dict[str, str] = field(default_factory=library_versions)
    outputs: Dict[str, str] = field(default_factory=dict)
    runtime_seconds: float = 0.0
    empty_posteriors: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "command": self.command,
            "config": self.config,
            "versions": self.versions,
            "outputs": dict(sorted(self.outputs.items())),
            "runtime_seconds": round(self.runtime_seconds, 3),
            "empty_posteriors": list(self.empty_posteriors),
        }


def write_manifest(manifest: RunManifest, out_dir) -> Path:
    """Write ``manifest.json`` into ``out_dir`` atomically."""
    path = write_json_atomic(manifest.to_dict(), Path(out_dir) / MANIFEST_NAME)
    logger.info(f"Manifest written to {path} ({len(manifest.outputs)} outputs)")
    return path


class RunRecorder:
    """
    Writes a run's data files into one directory and checksums each of them.

    Example:
        >>> recorder = RunRecorder("runs/moments-ladder", "moments-ladder", "augment", cfg.to_dict())
        >>> recorder.frame("augmentation.csv", report.to_frame())
        >>> recorder.finish()
    """

    def __init__(self, out_dir, experiment: str, command: str, config: Dict[str, Any]):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(experiment, command, config)
        self._started = time.perf_counter()

    def _register(self, path: Path) -> Path:
        self.manifest.outputs[path.name] = file_checksum(path)
        return path

    def frame(self, name: str, frame: pd.DataFrame) -> Path:
        return self._register(write_csv(frame, self.out_dir / name))

    def json(self, name: str, payload: Any) -> Path:
        return self._register(write_json_atomic(payload, self.out_dir / name))

    @property
    def files(self) -> List[str]:
        return sorted(self.manifest.outputs)

    def finish(self) -> RunManifest:
        self.manifest.runtime_seconds = time.perf_counter() - self._started
        write_manifest(self.manifest, self.out_dir)
        return self.manifest
