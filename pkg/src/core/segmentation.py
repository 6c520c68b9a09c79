"""
Segmentation Module
Keystroke onset detection on short-window energies and extraction of fixed
85 ms keystroke windows (5 ms before the onset, 80 ms after).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy.ndimage import maximum_filter1d, uniform_filter1d

from src.core.signal_io import DualAccel, SensorSession, StereoAudio
from src.errors import ConfigError, EmptyInputError, RangeError

logger = logging.getLogger(__name__)

PRE_ONSET_MS = 5.0
POST_ONSET_MS = 80.0
_EDGE_EPS = 1e-6


@dataclass(frozen=True)
class EnergyTrace:
    """Per-window energies; hop equals the window (non-overlapping)."""
    energies: np.ndarray
    window_ms: float
    sample_rate: float
    hop_ms: float = None

    def __post_init__(self):
        if self.window_ms <= 0:
            raise ConfigError(f"window_ms must be positive, got {self.window_ms}")
        if self.hop_ms is None:
            object.__setattr__(self, "hop_ms", self.window_ms)
        energies = np.asarray(self.energies, dtype=np.float64)
        if np.any(energies < 0):
            raise ConfigError("energies must be non-negative")
        object.__setattr__(self, "energies", energies)

    def __len__(self) -> int:
        return int(self.energies.size)

    def times(self) -> np.ndarray:
        return np.arange(len(self)) * self.hop_ms / 1000.0


@dataclass(frozen=True)
class PeakPickParams:
    """
    Adaptive-threshold peak picking parameters.

    A window is a peak when it is the maximum over +/- ``local_window_ms`` and
    exceeds the local mean by ``offset_multiplier`` local standard deviations.
    ``min_peak_ratio`` rejects peaks below that fraction of the trace maximum;
    ``backtrack_ratio`` walks each peak back to the first window still above
    that fraction of the peak energy, which is reported as the onset.
    """
    local_window_ms: float = 50.0
    offset_multiplier: float = 3.0
    min_gap_ms: float = 100.0
    min_peak_ratio: float = 0.01
    backtrack_ratio: float = 0.5

    def __post_init__(self):
        for name in ("local_window_ms", "offset_multiplier", "min_gap_ms"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 <= self.min_peak_ratio < 1:
            raise ConfigError("min_peak_ratio must lie in [0, 1)")
        if not 0 < self.backtrack_ratio <= 1:
            raise ConfigError("backtrack_ratio must lie in (0, 1]")


@dataclass(frozen=True)
class KeystrokeSegment:
    start_time: float
    audio: StereoAudio
    accel: DualAccel
    index: int

    def swapped(self) -> "KeystrokeSegment":
        return KeystrokeSegment(self.start_time, self.audio.swapped(), self.accel.swapped(), self.index)


def energy_trace(channel: np.ndarray, sample_rate: float, window_ms: float = 1.0) -> EnergyTrace:
    """
    Sum of squared samples over consecutive windows; the trailing partial window is dropped.

    Raises:
        EmptyInputError: empty channel
        ConfigError: window shorter than one sample
    """
    channel = np.asarray(channel, dtype=np.float64)
    if channel.size == 0:
        raise EmptyInputError("cannot compute energies of an empty channel")
    if window_ms <= 0:
        raise ConfigError(f"window_ms must be positive, got {window_ms}")
    window = int(round(window_ms * sample_rate / 1000.0))
    if window < 1:
        raise ConfigError(f"{window_ms} ms is shorter than one sample at {sample_rate} Hz")
    n_windows = channel.size // window
    framed = channel[: n_windows * window].reshape(n_windows, window)
    return EnergyTrace(np.sum(framed * framed, axis=1), window_ms, sample_rate)


def detect_starts(trace: EnergyTrace, params: PeakPickParams = PeakPickParams()) -> List[float]:
    """
    Keystroke start times (seconds) from an energy trace.

    Starts closer than ``min_gap_ms`` to an already accepted start are
    discarded; the earlier one wins.
    """
    energies = trace.energies
    if energies.size == 0:
        return []
    peak = float(energies.max())
    if peak <= 0:
        return []

    half = max(1, int(round(params.local_window_ms / trace.hop_ms)))
    size = 2 * half + 1
    local_max = maximum_filter1d(energies, size=size, mode="constant", cval=0.0)
    local_mean = uniform_filter1d(energies, size=size, mode="reflect")
    local_sq = uniform_filter1d(energies * energies, size=size, mode="reflect")
    local_std = np.sqrt(np.maximum(local_sq - local_mean * local_mean, 0.0))

    is_peak = (
        (energies >= local_max)
        & (energies > local_mean + params.offset_multiplier * local_std)
        & (energies >= params.min_peak_ratio * peak)
        & (energies > 0)
    )

    hop_s = trace.hop_ms / 1000.0
    min_gap_s = params.min_gap_ms / 1000.0
    starts: List[float] = []
    for i in np.flatnonzero(is_peak):
        floor = params.backtrack_ratio * energies[i]
        j = int(i)
        while j > 0 and energies[j - 1] >= floor:
            j -= 1
        start = j * hop_s
        if starts and start - starts[-1] < min_gap_s - 1e-12:
            continue
        starts.append(start)
    logger.debug("detected %d keystroke starts", len(starts))
    return starts


def detect_keystrokes(session: SensorSession, params: PeakPickParams = PeakPickParams(),
                      window_ms: float = 1.0) -> List[float]:
    """Start times from the left+right sum of the session audio."""
    audio = session.audio
    if audio.n_samples == 0:
        return []
    trace = energy_trace(audio.channel_sum(), audio.sample_rate, window_ms)
    return detect_starts(trace, params)


# ============================================================================
# SEGMENT EXTRACTION
# ============================================================================

def window_bounds(start_time: float, sample_rate: float,
                  pre_ms: float = PRE_ONSET_MS, post_ms: float = POST_ONSET_MS):
    """First sample index (may be negative) and the fixed window length."""
    first = math.floor(start_time * sample_rate - pre_ms * sample_rate / 1000.0 + _EDGE_EPS)
    length = math.ceil((pre_ms + post_ms) * sample_rate / 1000.0 - _EDGE_EPS)
    return first, length


def _padded_slice(values: np.ndarray, first: int, length: int) -> np.ndarray:
    """Rows [first, first + length) with zeros where the range leaves the array."""
    out = np.zeros((length,) + values.shape[1:], dtype=np.float64)
    lo = max(first, 0)
    hi = min(first + length, values.shape[0])
    if hi > lo:
        out[lo - first: hi - first] = values[lo:hi]
    return out


def extract_segments(session: SensorSession, starts: Sequence[float],
                     pre_ms: float = PRE_ONSET_MS, post_ms: float = POST_ONSET_MS) -> List[KeystrokeSegment]:
    """
    Cut [start - 5 ms, start + 80 ms] from audio and accelerometers.

    Windows reaching past either end of the session are zero-padded, so every
    segment of a session has the same sample count per modality.

    Raises:
        RangeError: a start lies outside the session or starts are unsorted
    """
    starts = [float(s) for s in starts]
    if any(b < a for a, b in zip(starts, starts[1:])):
        raise RangeError("starts must be sorted ascending")

    audio, accel = session.audio, session.accel
    segments = []
    for index, start in enumerate(starts):
        if start < 0 or start > session.duration:
            raise RangeError(f"start {start:.4f} s outside session of {session.duration:.4f} s")
        a_first, a_len = window_bounds(start, audio.sample_rate, pre_ms, post_ms)
        g_first, g_len = window_bounds(start, accel.sample_rate, pre_ms, post_ms)
        seg_audio = StereoAudio(
            _padded_slice(audio.left, a_first, a_len),
            _padded_slice(audio.right, a_first, a_len),
            audio.sample_rate,
        )
        seg_accel = DualAccel(
            _padded_slice(accel.left, g_first, g_len),
            _padded_slice(accel.right, g_first, g_len),
            accel.sample_rate,
        )
        segments.append(KeystrokeSegment(start, seg_audio, seg_accel, index))
    return segments
