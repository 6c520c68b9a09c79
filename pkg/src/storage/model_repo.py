"""
Model Repository
Versioned joblib bundles holding the trained group models, the optional flat
baseline and keyboard-type model, and the config they were trained with.
"""

import hashlib
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, Optional

import joblib

from src.errors import CompatError, IoError
from src.models.grouping import GroupModelSet

logger = logging.getLogger(__name__)

BUNDLE_FORMAT = "overhear-model-bundle"
BUNDLE_VERSION = 1


def calculate_md5(file_path: str) -> Optional[str]:
    """
    Calculate MD5 hash of a file.

    Args:
        file_path: Path to file

    Returns:
        str: MD5 hash hexdigest or None on error
    """
    try:
        hash_md5 = hashlib.md5()
        with open(file_path, "rb") as f:
            for chunk in iter(lambda: f.read(4096), b""):
                hash_md5.update(chunk)
        return hash_md5.hexdigest()
    except OSError as e:
        logger.error("Error calculating MD5 of %s: %s", file_path, e)
        return None


@dataclass
class ModelBundle:
    group_models: GroupModelSet
    config: Dict[str, Any] = field(default_factory=dict)
    flat_model: Any = None
    keyboard_model: Any = None
    created_at: str = ""
    md5: Optional[str] = None


def save_model_bundle(bundle: ModelBundle, path: str) -> str:
    """
    Dump the bundle with joblib.

    Returns:
        MD5 of the written file
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    payload = {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "created_at": bundle.created_at or datetime.now().isoformat(timespec="seconds"),
        "config": bundle.config,
        "group_models": bundle.group_models,
        "flat_model": bundle.flat_model,
        "keyboard_model": bundle.keyboard_model,
    }
    joblib.dump(payload, path)
    bundle.md5 = calculate_md5(path)
    logger.info("💾 Saved model bundle %s (md5 %s)", path, bundle.md5)
    return bundle.md5


def load_model_bundle(path: str) -> ModelBundle:
    """
    Raises:
        IoError: file missing
        CompatError: unreadable file, foreign format or unsupported version
    """
    if not os.path.isfile(path):
        raise IoError(f"model bundle not found: {path}")
    try:
        payload = joblib.load(path)
    except Exception as exc:
        raise CompatError(f"cannot decode model bundle {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != BUNDLE_FORMAT:
        raise CompatError(f"{path} is not a model bundle")
    if payload.get("version") != BUNDLE_VERSION:
        raise CompatError(f"bundle version {payload.get('version')} not supported "
                          f"(expected {BUNDLE_VERSION})")
    if not isinstance(payload.get("group_models"), GroupModelSet):
        raise CompatError(f"{path} has no group models")
    return ModelBundle(
        group_models=payload["group_models"],
        config=payload.get("config") or {},
        flat_model=payload.get("flat_model"),
        keyboard_model=payload.get("keyboard_model"),
        created_at=payload.get("created_at", ""),
        md5=calculate_md5(path),
    )
