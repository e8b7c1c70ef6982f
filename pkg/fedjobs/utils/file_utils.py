"""
File Utilities
Helper functions for config documents, ledgers, snapshots and CSV tables.
"""

import logging
from pathlib import Path
from typing import Any, Iterable, List, Union

import orjson
import pandas as pd
import yaml
from pydantic import ValidationError

from fedjobs.models.domain import SimConfig, SimulationState
from fedjobs.models.error import ConfigurationError, SnapshotError
from fedjobs.models.ledger import RoundLedger

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _validation_lines(exc: ValidationError) -> List[str]:
    return [
        f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}"
        for error in exc.errors()
    ]


# -----------------------------------------------------------------------------
# Config documents
# -----------------------------------------------------------------------------

def load_document(file_path: PathLike, encoding: str = 'utf-8') -> Any:
    """
    Load a YAML or JSON document.

    Raises:
        ConfigurationError: If the file is missing or not parseable
    """
    file_path = Path(file_path)
    try:
        with open(file_path, 'r', encoding=encoding) as f:
            return yaml.safe_load(f)
    except OSError as e:
        raise ConfigurationError(f"Cannot read config {file_path}: {e}", path=file_path) from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Cannot parse config {file_path}: {e}", path=file_path) from e


def load_config(file_path: PathLike) -> SimConfig:
    """
    Load and structurally validate a SimConfig document.

    Range invariants are not checked here; see ``validate_config``.

    Raises:
        ConfigurationError: Unreadable document, unknown keys or wrong types
    """
    document = load_document(file_path)
    if not isinstance(document, dict):
        raise ConfigurationError(f"Config {file_path} must be a mapping", path=file_path)
    try:
        return SimConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigurationError(
            f"Invalid config {file_path}",
            details=_validation_lines(e),
            path=file_path,
        ) from e


def save_config(config: SimConfig, file_path: PathLike, encoding: str = 'utf-8') -> Path:
    """Write a SimConfig as YAML with its fields in declaration order."""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    document = config.model_dump(mode="json", exclude_none=True)
    with open(file_path, 'w', encoding=encoding) as f:
        yaml.safe_dump(document, f, sort_keys=False, allow_unicode=True)
    logger.info(f"Saved config to: {file_path}")
    return file_path


# -----------------------------------------------------------------------------
# Ledgers
# -----------------------------------------------------------------------------

def write_ledgers(ledgers: Iterable[RoundLedger], file_path: PathLike) -> Path:
    """One RoundLedger per line; floats keep full round-trip precision."""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, 'wb') as f:
        for ledger in ledgers:
            f.write(orjson.dumps(ledger.model_dump(mode="python"), option=orjson.OPT_NON_STR_KEYS))
            f.write(b"\n")
    return file_path


def read_ledgers(file_path: PathLike) -> List[RoundLedger]:
    """Read a ledger JSONL file back into RoundLedger models."""
    ledgers = []
    with open(file_path, 'rb') as f:
        for line in f:
            if line.strip():
                ledgers.append(RoundLedger.model_validate(orjson.loads(line)))
    return ledgers


# -----------------------------------------------------------------------------
# Snapshots
# -----------------------------------------------------------------------------

def save_snapshot(state: SimulationState, file_path: PathLike) -> Path:
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    file_path.write_bytes(
        orjson.dumps(state.model_dump(mode="python"), option=orjson.OPT_NON_STR_KEYS | orjson.OPT_INDENT_2)
    )
    return file_path


def load_snapshot(file_path: PathLike) -> SimulationState:
    """
    Read a SimulationState snapshot.

    Raises:
        SnapshotError: If the file is missing or does not hold a state
    """
    file_path = Path(file_path)
    try:
        return SimulationState.model_validate(orjson.loads(file_path.read_bytes()))
    except OSError as e:
        raise SnapshotError(f"Cannot read snapshot {file_path}: {e}", path=file_path) from e
    except orjson.JSONDecodeError as e:
        raise SnapshotError(f"Snapshot {file_path} is not JSON: {e}", path=file_path) from e
    except ValidationError as e:
        raise SnapshotError(
            f"Snapshot {file_path} is not a simulation state",
            details=_validation_lines(e),
            path=file_path,
        ) from e


# -----------------------------------------------------------------------------
# Tables
# -----------------------------------------------------------------------------

def write_csv(frame: pd.DataFrame, file_path: PathLike) -> Path:
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(file_path, index=False)
    logger.info(f"Saved table to: {file_path}")
    return file_path
