"""
Output writers: CSV tables with provenance columns and one JSON manifest per
command invocation.
"""

from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union
import json
import logging
import platform

import numpy as np
import pandas as pd
import scipy

import canoe_lab
from canoe_lab.experiments.config import ExperimentConfig

CSV_FLOAT_FORMAT = "%.17g"


def module_versions() -> Dict[str, str]:
    return {
        "canoe_lab": canoe_lab.__version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "python": platform.python_version(),
    }


def provenance(cfg: ExperimentConfig, seed: Optional[int]) -> Dict[str, Any]:
    """
    Columns appended to every output row.
    """
    versions = module_versions()
    return {
        "config_hash": cfg.config_hash,
        "seed": -1 if seed is None else int(seed),
        "canoe_lab_version": versions["canoe_lab"],
        "numpy_version": versions["numpy"],
        "scipy_version": versions["scipy"],
    }


def write_csv(rows: Union[Sequence[Dict[str, Any]], pd.DataFrame], path: Path) -> pd.DataFrame:
    """
    Write rows (or a frame) with '.' decimals and 17 significant digits.
    :return: The written frame.
    """
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logging.info(f"Wrote {len(frame)} rows to {path}")
    return frame


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path)


def write_manifest(
    out_dir: Path,
    command: str,
    cfg: Optional[ExperimentConfig],
    outputs: List[Path],
    options: Dict[str, Any],
    summary: Optional[Dict[str, Any]] = None,
) -> Path:
    """
    Record what one invocation read and wrote.
    :return: Path of the manifest.
    """
    manifest = {
        "command": command,
        "created": datetime.now(timezone.utc).isoformat(),
        "config_path": cfg.path if cfg else None,
        "config_hash": cfg.config_hash if cfg else None,
        "options": options,
        "versions": module_versions(),
        "outputs": [str(p) for p in outputs],
        "summary": summary or {},
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"manifest_{command.replace('-', '_')}.json"
    path.write_text(json.dumps(manifest, indent=2, default=str), encoding="utf-8")
    logging.info(f"Wrote manifest {path}")
    return path
