"""
Session Repository
Reads and writes sensor sessions: 2-channel audio file, accelerometer CSV
(``t_sec,lx,ly,lz,rx,ry,rz``), labels JSON (``[{"key": "a", "t": 1.234}]``)
and a small ``meta.json`` for session directories.
"""

import json
import logging
import os
import re
from typing import Optional, Tuple

import numpy as np
import pandas as pd
import soundfile as sf

from src.core.signal_io import DualAccel, KeyLabel, SensorSession, SessionMeta, StereoAudio
from src.errors import ChannelCountError, DataError, IoError, ParseError

logger = logging.getLogger(__name__)

ACCEL_COLUMNS = ["t_sec", "lx", "ly", "lz", "rx", "ry", "rz"]
AUDIO_FILE = "audio.wav"
ACCEL_FILE = "accel.csv"
LABELS_FILE = "labels.json"
META_FILE = "meta.json"
_LINE_IN_MESSAGE = re.compile(r"line (\d+)")


def _require_file(path: str, what: str) -> None:
    if not path or not os.path.isfile(path):
        raise IoError(f"{what} not found: {path}")


# ============================================================================
# AUDIO
# ============================================================================

def load_audio(path: str) -> StereoAudio:
    """
    Raises:
        IoError: missing or unreadable file
        ChannelCountError: not exactly 2 channels
    """
    _require_file(path, "audio file")
    try:
        data, rate = sf.read(path, dtype="float64", always_2d=True)
    except RuntimeError as exc:
        raise IoError(f"cannot read audio {path}: {exc}") from exc
    if data.shape[1] != 2:
        raise ChannelCountError(f"{path}: expected 2 channels, found {data.shape[1]}")
    return StereoAudio(data[:, 0], data[:, 1], int(rate))


def save_audio(audio: StereoAudio, path: str) -> None:
    """64-bit float WAV so a reload is bit-identical."""
    sf.write(path, audio.as_array(), audio.sample_rate, subtype="DOUBLE")


# ============================================================================
# ACCELEROMETER CSV
# ============================================================================

def _estimate_rate(t: np.ndarray) -> float:
    if t.size < 2 or t[-1] <= t[0]:
        raise DataError("accelerometer CSV needs at least 2 rows with increasing t_sec")
    rate = (t.size - 1) / (t[-1] - t[0])
    nearest = round(rate)
    return float(nearest) if abs(rate - nearest) < 1e-6 * rate else float(rate)


def load_accel(path: str, sample_rate: Optional[float] = None) -> DualAccel:
    """
    Parse the accelerometer CSV; the first timestamp becomes t=0.

    ``sample_rate`` (from ``meta.json``) wins over the rate estimated from timestamps.

    Raises:
        IoError: file missing
        ParseError: wrong header, malformed row or non-increasing t_sec (with line number)
    """
    _require_file(path, "accelerometer CSV")
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except pd.errors.ParserError as exc:
        match = _LINE_IN_MESSAGE.search(str(exc))
        raise ParseError(f"malformed accelerometer CSV {path}",
                         line=int(match.group(1)) if match else None) from exc
    except pd.errors.EmptyDataError:
        raise ParseError(f"empty accelerometer CSV {path}", line=1) from None

    if [str(c).strip() for c in df.columns] != ACCEL_COLUMNS:
        raise ParseError(f"header must be {','.join(ACCEL_COLUMNS)}", line=1)
    values = df.apply(pd.to_numeric, errors="coerce")
    bad_rows = np.flatnonzero(values.isna().any(axis=1).to_numpy())
    if bad_rows.size:
        # +2: one for the header, one for 1-based lines
        raise ParseError("non-numeric or missing accelerometer value", line=int(bad_rows[0]) + 2)

    data = values.to_numpy(dtype=np.float64)
    t = data[:, 0]
    steps = np.flatnonzero(np.diff(t) <= 0)
    if steps.size:
        raise ParseError("t_sec must increase monotonically", line=int(steps[0]) + 3)
    rate = float(sample_rate) if sample_rate else _estimate_rate(t)
    return DualAccel(data[:, 1:4], data[:, 4:7], rate, t0=float(t[0]) if t.size else 0.0)


def save_accel(accel: DualAccel, path: str) -> None:
    t = accel.t0 + np.arange(accel.n_samples) / accel.sample_rate
    df = pd.DataFrame(np.column_stack([t, accel.left, accel.right]), columns=ACCEL_COLUMNS)
    df.to_csv(path, index=False)


# ============================================================================
# LABELS
# ============================================================================

def load_labels(path: str) -> Tuple[KeyLabel, ...]:
    """
    Raises:
        IoError: file missing
        ParseError: invalid JSON or entries without ``key``/``t``
    """
    _require_file(path, "labels file")
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid labels JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(raw, list):
        raise ParseError("labels JSON must be an array", line=1)
    labels = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "key" not in item or "t" not in item:
            raise ParseError(f"label #{i} needs 'key' and 't'")
        labels.append(KeyLabel(str(item["key"]), float(item["t"])))
    return tuple(labels)


def save_labels(labels, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump([{"key": label.key, "t": label.press_time} for label in labels], f, indent=1)


# ============================================================================
# SESSIONS
# ============================================================================

def load_session(audio_path: str, accel_path: str, labels_path: Optional[str] = None,
                 meta: Optional[SessionMeta] = None, accel_rate: Optional[float] = None) -> SensorSession:
    """
    Load a validated session from its three files.

    Raises:
        ChannelCountError: audio is not stereo
        ParseError: malformed CSV row or labels
        AlignmentError: audio and accelerometer durations differ by more than 50 ms
        IoError: a file is missing
    """
    audio = load_audio(audio_path)
    accel = load_accel(accel_path, accel_rate)
    labels = load_labels(labels_path) if labels_path else None
    return SensorSession(audio, accel, labels, meta or SessionMeta())


def save_session(session: SensorSession, directory: str) -> str:
    """Write ``audio.wav``, ``accel.csv``, ``meta.json`` and (if labelled) ``labels.json``."""
    os.makedirs(directory, exist_ok=True)
    save_audio(session.audio, os.path.join(directory, AUDIO_FILE))
    save_accel(session.accel, os.path.join(directory, ACCEL_FILE))
    labels_path = os.path.join(directory, LABELS_FILE)
    if session.labels is not None:
        save_labels(session.labels, labels_path)
    elif os.path.exists(labels_path):
        os.remove(labels_path)
    meta = {
        "participant": session.meta.participant,
        "keyboard": session.meta.keyboard,
        "accel_sample_rate": session.accel.sample_rate,
    }
    with open(os.path.join(directory, META_FILE), "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2)
    logger.debug("saved session to %s", directory)
    return directory


def load_session_dir(directory: str) -> SensorSession:
    """Session directory written by :func:`save_session` (``meta.json`` and labels optional)."""
    if not os.path.isdir(directory):
        raise IoError(f"session directory not found: {directory}")
    meta, accel_rate = SessionMeta(), None
    meta_path = os.path.join(directory, META_FILE)
    if os.path.isfile(meta_path):
        with open(meta_path, "r", encoding="utf-8") as f:
            try:
                raw = json.load(f)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid meta.json: {exc.msg}", line=exc.lineno) from exc
        meta = SessionMeta(str(raw.get("participant", "unknown")), str(raw.get("keyboard", "unknown")))
        accel_rate = raw.get("accel_sample_rate")
    labels_path = os.path.join(directory, LABELS_FILE)
    return load_session(
        os.path.join(directory, AUDIO_FILE),
        os.path.join(directory, ACCEL_FILE),
        labels_path if os.path.isfile(labels_path) else None,
        meta,
        accel_rate,
    )
