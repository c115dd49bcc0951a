"""Versioned ``.npz`` checkpoint archives.

Arrays are stored under their own names; everything else (format
version, layer shapes, optimizer scalars, RNG state, agent counters,
rules text) goes into one JSON string under ``__metadata__``.
"""

from __future__ import annotations

import json
import logging
import os
import zipfile
from typing import Any, Dict, Tuple

import numpy as np

from rdq_lab.constants import CHECKPOINT_FORMAT_VERSION
from rdq_lab.errors import CheckpointError

logger = logging.getLogger(__name__)

_METADATA_KEY = "__metadata__"


def save_checkpoint(path: str, arrays: Dict[str, np.ndarray], metadata: Dict[str, Any]) -> str:
    """Write *arrays* and *metadata* to *path* (``.npz`` appended if missing)."""
    if not path.endswith(".npz"):
        path += ".npz"
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    meta = {"format_version": CHECKPOINT_FORMAT_VERSION, **metadata}
    payload = {name: np.asarray(arr) for name, arr in arrays.items()}
    payload[_METADATA_KEY] = np.array(json.dumps(meta, sort_keys=True))
    with open(path, "wb") as f:
        np.savez(f, **payload)
    logger.debug("Checkpoint with %d array(s) written to %s", len(arrays), path)
    return path


def load_checkpoint(path: str) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
    """Inverse of :func:`save_checkpoint`; raises :class:`CheckpointError`."""
    try:
        with np.load(path, allow_pickle=False) as archive:
            arrays = {name: archive[name] for name in archive.files if name != _METADATA_KEY}
            if _METADATA_KEY not in archive.files:
                raise CheckpointError(f"Checkpoint '{path}' has no metadata entry.")
            metadata = json.loads(str(archive[_METADATA_KEY]))
    except CheckpointError:
        raise
    except (OSError, ValueError, zipfile.BadZipFile) as exc:
        raise CheckpointError(f"Cannot read checkpoint '{path}': {exc}") from exc
    version = metadata.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(
            f"Checkpoint '{path}' has format version {version!r}, "
            f"expected {CHECKPOINT_FORMAT_VERSION}."
        )
    return arrays, metadata
