"""
Signal I/O Module
Domain types for sensor streams (stereo audio, dual 3-axis accelerometers,
key labels) and sample-rate conversion for the sampling-rate study.

File loading and saving live in ``src.storage.session_repo``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from scipy import signal as sps

from src.errors import AlignmentError, ConfigError, DataError, ShapeError

KEYBOARD_TYPES = ("K1", "K2", "K3", "unknown")
ALIGNMENT_TOLERANCE_S = 0.050


def _frozen_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise ShapeError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StereoAudio:
    """Two equally long channels of normalized samples in [-1, 1]."""
    left: np.ndarray
    right: np.ndarray
    sample_rate: int

    def __post_init__(self):
        left = _frozen_array(self.left, 1, "left")
        right = _frozen_array(self.right, 1, "right")
        if left.shape != right.shape:
            raise ShapeError(f"channel lengths differ: {left.size} != {right.size}")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ConfigError(f"sample_rate must be a positive integer, got {self.sample_rate}")
        if not (np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
            raise DataError("audio contains non-finite samples")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def n_samples(self) -> int:
        return int(self.left.size)

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate

    def channel_sum(self) -> np.ndarray:
        return self.left + self.right

    def swapped(self) -> "StereoAudio":
        return StereoAudio(self.right, self.left, self.sample_rate)

    def as_array(self) -> np.ndarray:
        """Samples as an (n, 2) array, column order (left, right)."""
        return np.column_stack([self.left, self.right])


@dataclass(frozen=True)
class DualAccel:
    """
    Left and right 3-axis accelerometer streams in g.

    Each side is an (n, 3) array with columns x, y, z. ``t0`` is the first
    CSV timestamp; it is kept only so a saved session reproduces its file.
    """
    left: np.ndarray
    right: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __post_init__(self):
        left = _frozen_array(self.left, 2, "left accel")
        right = _frozen_array(self.right, 2, "right accel")
        if left.shape[1] != 3 or right.shape[1] != 3:
            raise ShapeError("accelerometer streams need exactly 3 axes")
        if left.shape != right.shape:
            raise ShapeError(f"accelerometer lengths differ: {left.shape[0]} != {right.shape[0]}")
        if self.sample_rate <= 0:
            raise ConfigError(f"accelerometer sample_rate must be positive, got {self.sample_rate}")
        if not (np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
            raise DataError("accelerometer data contains non-finite values")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    @property
    def n_samples(self) -> int:
        return int(self.left.shape[0])

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate

    @property
    def left_z(self) -> np.ndarray:
        return self.left[:, 2]

    @property
    def right_z(self) -> np.ndarray:
        return self.right[:, 2]

    def swapped(self) -> "DualAccel":
        return DualAccel(self.right, self.left, self.sample_rate, self.t0)


@dataclass(frozen=True)
class KeyLabel:
    key: str
    press_time: float

    def __post_init__(self):
        if len(self.key) != 1 or not ("a" <= self.key <= "z"):
            raise DataError(f"label key must be a single letter a-z, got {self.key!r}")
        if not np.isfinite(self.press_time) or self.press_time < 0:
            raise DataError(f"press_time must be >= 0, got {self.press_time}")


@dataclass(frozen=True)
class SessionMeta:
    participant: str = "unknown"
    keyboard: str = "unknown"

    def __post_init__(self):
        if self.keyboard not in KEYBOARD_TYPES:
            raise DataError(f"keyboard must be one of {KEYBOARD_TYPES}, got {self.keyboard!r}")


@dataclass(frozen=True)
class SensorSession:
    """Time-aligned audio + accelerometer streams with optional ground truth."""
    audio: StereoAudio
    accel: DualAccel
    labels: Optional[Tuple[KeyLabel, ...]] = None
    meta: SessionMeta = field(default_factory=SessionMeta)

    def __post_init__(self):
        mismatch = abs(self.audio.duration - self.accel.duration)
        if mismatch > ALIGNMENT_TOLERANCE_S:
            raise AlignmentError(
                f"audio lasts {self.audio.duration:.3f} s but accelerometer {self.accel.duration:.3f} s"
            )
        if self.labels is not None:
            labels = tuple(self.labels)
            times = [label.press_time for label in labels]
            if any(b < a for a, b in zip(times, times[1:])):
                raise DataError("labels must be sorted by press_time")
            object.__setattr__(self, "labels", labels)

    @property
    def duration(self) -> float:
        return self.audio.duration

    def label_keys(self) -> List[str]:
        return [label.key for label in self.labels or ()]

    def label_times(self) -> List[float]:
        return [label.press_time for label in self.labels or ()]

    def with_audio(self, audio: StereoAudio) -> "SensorSession":
        return SensorSession(audio, self.accel, self.labels, self.meta)

    def with_streams(self, audio: StereoAudio, accel: DualAccel) -> "SensorSession":
        return SensorSession(audio, accel, self.labels, self.meta)


# ============================================================================
# RESAMPLING
# ============================================================================

def resample(audio: StereoAudio, target_rate: int) -> StereoAudio:
    """
    Polyphase (windowed-sinc) resampling of both channels.

    Output length is round(n * target / source); identity when the rates match.

    Raises:
        ConfigError: target_rate is not a positive integer
    """
    if target_rate is None or target_rate <= 0 or int(target_rate) != target_rate:
        raise ConfigError(f"target_rate must be a positive integer, got {target_rate}")
    target_rate = int(target_rate)
    if target_rate == audio.sample_rate:
        return audio

    ratio = Fraction(target_rate, audio.sample_rate)
    expected = int(round(audio.n_samples * target_rate / audio.sample_rate))
    channels = []
    for channel in (audio.left, audio.right):
        out = sps.resample_poly(channel, ratio.numerator, ratio.denominator)
        if out.size >= expected:
            out = out[:expected]
        else:
            out = np.pad(out, (0, expected - out.size))
        channels.append(out)
    return StereoAudio(channels[0], channels[1], target_rate)


def median_frequency(values: np.ndarray, sample_rate: float) -> float:
    """
    Frequency below which half of the signal power lies.

    Used as a head-motion intensity measure on gyro/accelerometer traces:
    faster head movement shifts the median up.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return 0.0
    values = values - values.mean()
    freqs, power = sps.periodogram(values, fs=sample_rate)
    total = power.sum()
    if total <= 0:
        return 0.0
    cumulative = np.cumsum(power)
    return float(freqs[int(np.searchsorted(cumulative, 0.5 * total))])
