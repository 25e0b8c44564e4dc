"""Deterministic report files: hashed CSV tables and an atomically replaced summary.json."""

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List

import pandas as pd

from willmore_tori.cli_reports.config import ExperimentConfig
from willmore_tori.logging_config import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.15g"


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def stable_hash(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the validated config; output_dir does not change results and is left out."""
    payload = config.model_dump(mode="json", exclude={"output_dir"})
    return stable_hash(payload)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class ReportWriter:
    """Writes the files of one run below ``out_dir``; calls are serialized by the runner."""

    def __init__(self, out_dir: Path, config: ExperimentConfig):
        self.out_dir = Path(out_dir)
        self.config = config
        self.hash = config_hash(config)
        self.files: List[str] = []

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        """``<name>.csv`` whose first line is ``# config_hash=<sha256>``."""
        path = self.out_dir / f"{name}.csv"
        body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        _atomic_write(path, f"# config_hash={self.hash}\n{body}")
        self.files.append(path.name)
        logger.debug(f"Wrote {path} ({len(frame)} rows)")
        return path

    def write_summary(self, summary: Dict[str, Any]) -> Path:
        path = self.out_dir / "summary.json"
        payload = {"config_hash": self.hash, "config": self.config.model_dump(mode="json"), **summary}
        payload["files"] = sorted(set(self.files))
        _atomic_write(path, json.dumps(payload, sort_keys=True, indent=2, default=_jsonable) + "\n")
        logger.info(f"Wrote {path}")
        return path


def _jsonable(value: Any) -> Any:
    """Fallback for numpy scalars and arrays."""
    if hasattr(value, "tolist"):
        return value.tolist()
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def read_csv_with_hash(path: Path) -> tuple[str, pd.DataFrame]:
    """Inverse of ReportWriter.write_csv: (config hash, table)."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip()
    if not header.startswith("# config_hash="):
        raise ValueError(f"{path} does not start with a config hash line")
    return header.split("=", 1)[1], pd.read_csv(path, skiprows=1)
