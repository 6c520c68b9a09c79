"""
Feature Extraction Module
MFCC + RMSE descriptors:

- 170 values per keystroke: for each channel, 6 statistics (mean, std,
  skewness, max, median, min) of each of 14 MFCC coefficients across
  frames, followed by the RMSE of both channels.
- 7 values per keyboard-type window: window means of the first 6 MFCC
  coefficients plus RMSE, both averaged over the two channels.

Layout of the keystroke vector (coefficient-major inside a channel):
``[left_c0_mean, left_c0_std, ..., left_c13_min, right_c0_mean, ..., rmse_left, rmse_right]``
"""

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view
from scipy.fft import dct

from src.core.segmentation import KeystrokeSegment
from src.core.signal_io import StereoAudio
from src.errors import (
    ConfigError,
    DataError,
    EmptyInputError,
    InsufficientDataError,
    InsufficientFramesError,
    ShapeError,
)

STAT_NAMES = ("mean", "std", "skew", "max", "median", "min")
MIN_FRAMES = 3
VARIANCE_FLOOR = 1e-12


def hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MfccConfig:
    n_coeffs: int = 14
    n_mel_filters: int = 26
    frame_ms: float = 10.0
    hop_ms: float = 5.0
    fft_size: Optional[int] = None  # None -> next power of two >= frame length
    log_floor: float = 1e-10

    def __post_init__(self):
        if self.n_coeffs < 1:
            raise ConfigError("n_coeffs must be positive")
        if self.n_coeffs > self.n_mel_filters:
            raise ConfigError(f"n_coeffs ({self.n_coeffs}) > n_mel_filters ({self.n_mel_filters})")
        if not (self.frame_ms >= self.hop_ms > 0):
            raise ConfigError("need frame_ms >= hop_ms > 0")
        if self.log_floor <= 0:
            raise ConfigError("log_floor must be positive")

    def frame_length(self, sample_rate: float) -> int:
        return max(1, int(round(self.frame_ms * sample_rate / 1000.0)))

    def hop_length(self, sample_rate: float) -> int:
        return max(1, int(round(self.hop_ms * sample_rate / 1000.0)))

    def resolved_fft_size(self, sample_rate: float) -> int:
        if self.fft_size:
            return int(self.fft_size)
        return 1 << (self.frame_length(sample_rate) - 1).bit_length()


KEYSTROKE_MFCC = MfccConfig()
KEYBOARD_MFCC = MfccConfig(n_coeffs=6)


# ============================================================================
# MFCC
# ============================================================================

def mel_center_frequencies(config: MfccConfig, sample_rate: float) -> np.ndarray:
    """Filter centers in Hz, equally spaced on the mel scale over [0, sample_rate / 2]."""
    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(sample_rate / 2.0), config.n_mel_filters + 2)
    return mel_to_hz(mel_points)[1:-1]


@lru_cache(maxsize=16)
def mel_filterbank(config: MfccConfig, sample_rate: float) -> np.ndarray:
    """
    Triangular filters on rfft bins, shape (n_mel_filters, fft_size // 2 + 1).

    Edges are rounded down to FFT bins; each row rises linearly to exactly 1 at
    its center bin and falls back to 0 at the next center.

    Raises:
        ConfigError: fewer than 2 filters or a non-positive rate
    """
    if config.n_mel_filters < 2:
        raise ConfigError(f"need at least 2 mel filters, got {config.n_mel_filters}")
    if sample_rate <= 0:
        raise ConfigError("sample_rate must be positive")
    n_fft = config.resolved_fft_size(sample_rate)
    n_bins = n_fft // 2 + 1
    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(sample_rate / 2.0), config.n_mel_filters + 2)
    bins = np.floor((n_fft + 1) * mel_to_hz(mel_points) / sample_rate).astype(int)
    bins = np.clip(bins, 0, n_bins - 1)

    fbank = np.zeros((config.n_mel_filters, n_bins))
    for i in range(1, config.n_mel_filters + 1):
        left, center, right = bins[i - 1], bins[i], bins[i + 1]
        for j in range(left, center):
            fbank[i - 1, j] = (j - left) / (center - left)
        for j in range(center + 1, right):
            fbank[i - 1, j] = (right - j) / (right - center)
        fbank[i - 1, center] = 1.0
    fbank.setflags(write=False)
    return fbank


def frame_signal(values: np.ndarray, frame_length: int, hop_length: int) -> np.ndarray:
    """Hamming-windowed frames, shape (n_frames, frame_length); no padding."""
    values = np.asarray(values, dtype=np.float64)
    if values.size < frame_length:
        return np.zeros((0, frame_length))
    frames = sliding_window_view(values, frame_length)[::hop_length]
    return frames * np.hamming(frame_length)


def _mfcc_rows(frames: np.ndarray, config: MfccConfig, sample_rate: float) -> np.ndarray:
    n_fft = config.resolved_fft_size(sample_rate)
    spectrum = np.fft.rfft(frames, n=n_fft, axis=-1)
    power = (spectrum.real ** 2 + spectrum.imag ** 2) / n_fft
    energies = power @ mel_filterbank(config, float(sample_rate)).T
    log_energies = np.log(np.maximum(energies, config.log_floor))
    return dct(log_energies, type=2, norm="ortho", axis=-1)[..., : config.n_coeffs]


def mfcc(frame: np.ndarray, config: MfccConfig, sample_rate: float) -> np.ndarray:
    """
    MFCC of one (already windowed) frame:
    power spectrum -> mel energies -> log(max(E, log_floor)) -> DCT-II -> first n_coeffs.

    Raises:
        EmptyInputError: empty frame
        ShapeError: frame longer than the FFT size
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size == 0:
        raise EmptyInputError("cannot compute MFCC of an empty frame")
    if frame.size > config.resolved_fft_size(sample_rate):
        raise ShapeError(f"frame of {frame.size} samples exceeds fft size "
                         f"{config.resolved_fft_size(sample_rate)}")
    return _mfcc_rows(frame[np.newaxis, :], config, sample_rate)[0]


def channel_mfcc(values: np.ndarray, config: MfccConfig, sample_rate: float) -> np.ndarray:
    """MFCC matrix (n_frames, n_coeffs) of a whole channel."""
    frames = frame_signal(values, config.frame_length(sample_rate), config.hop_length(sample_rate))
    if frames.shape[0] == 0:
        return np.zeros((0, config.n_coeffs))
    return _mfcc_rows(frames, config, sample_rate)


def rmse(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyInputError("cannot compute RMSE of an empty channel")
    return float(np.sqrt(np.mean(values * values)))


# ============================================================================
# KEYSTROKE FEATURES
# ============================================================================

def skewness(matrix: np.ndarray) -> np.ndarray:
    """Biased third standardized moment per column; 0 where the variance is below 1e-12."""
    centered = matrix - matrix.mean(axis=0)
    m2 = np.mean(centered ** 2, axis=0)
    m3 = np.mean(centered ** 3, axis=0)
    flat = m2 < VARIANCE_FLOOR
    safe = np.where(flat, 1.0, m2)
    return np.where(flat, 0.0, m3 / safe ** 1.5)


def frame_statistics(coeffs: np.ndarray) -> np.ndarray:
    """The 6 statistics of every coefficient, flattened coefficient-major."""
    stats = np.stack([
        coeffs.mean(axis=0),
        coeffs.std(axis=0),
        skewness(coeffs),
        coeffs.max(axis=0),
        np.median(coeffs, axis=0),
        coeffs.min(axis=0),
    ], axis=1)
    return stats.reshape(-1)


def feature_length(n_coeffs: int = 14) -> int:
    return 2 * n_coeffs * len(STAT_NAMES) + 2


def feature_names(n_coeffs: int = 14) -> List[str]:
    names = [f"{side}_c{c}_{stat}" for side in ("left", "right")
             for c in range(n_coeffs) for stat in STAT_NAMES]
    return names + ["rmse_left", "rmse_right"]


@dataclass(frozen=True)
class KeystrokeFeatures:
    values: np.ndarray
    n_coeffs: int = 14

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (feature_length(self.n_coeffs),):
            raise ShapeError(f"expected {feature_length(self.n_coeffs)} features, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataError("keystroke features contain non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def left_block(self) -> np.ndarray:
        return self.values[: self.n_coeffs * len(STAT_NAMES)]

    @property
    def right_block(self) -> np.ndarray:
        block = self.n_coeffs * len(STAT_NAMES)
        return self.values[block: 2 * block]

    @property
    def rmse_pair(self) -> np.ndarray:
        return self.values[-2:]


def keystroke_features(segment: KeystrokeSegment, config: MfccConfig = KEYSTROKE_MFCC) -> KeystrokeFeatures:
    """
    170-value descriptor of one keystroke segment.

    Raises:
        InsufficientFramesError: the segment yields fewer than 3 MFCC frames
    """
    audio = segment.audio
    blocks = []
    for channel in (audio.left, audio.right):
        coeffs = channel_mfcc(channel, config, audio.sample_rate)
        if coeffs.shape[0] < MIN_FRAMES:
            raise InsufficientFramesError(
                f"segment yields {coeffs.shape[0]} frames, need at least {MIN_FRAMES}"
            )
        blocks.append(frame_statistics(coeffs))
    blocks.append(np.array([rmse(audio.left), rmse(audio.right)]))
    return KeystrokeFeatures(np.concatenate(blocks), config.n_coeffs)


# ============================================================================
# KEYBOARD TYPE FEATURES
# ============================================================================

@dataclass(frozen=True)
class KeyboardTypeFeatures:
    """Window means of the first ``n_coeffs`` MFCCs followed by the mean RMSE."""
    values: np.ndarray
    n_coeffs: int = 6

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.n_coeffs + 1,):
            raise ShapeError(f"expected {self.n_coeffs + 1} keyboard-type values, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataError("keyboard-type features contain non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def keyboard_type_features(audio: StereoAudio, window_s: float = 30.0,
                           config: MfccConfig = KEYBOARD_MFCC) -> List[KeyboardTypeFeatures]:
    """
    One vector per non-overlapping window: channel-averaged window means of the
    first ``config.n_coeffs`` MFCCs plus channel-averaged RMSE.

    Raises:
        InsufficientDataError: audio shorter than one window
    """
    if window_s <= 0:
        raise ConfigError("window_s must be positive")
    window = int(round(window_s * audio.sample_rate))
    n_windows = audio.n_samples // window if window > 0 else 0
    if n_windows == 0:
        raise InsufficientDataError(
            f"audio lasts {audio.duration:.2f} s, shorter than one {window_s} s window"
        )
    vectors = []
    for w in range(n_windows):
        lo, hi = w * window, (w + 1) * window
        means, energies = [], []
        for channel in (audio.left[lo:hi], audio.right[lo:hi]):
            means.append(channel_mfcc(channel, config, audio.sample_rate).mean(axis=0))
            energies.append(rmse(channel))
        vectors.append(KeyboardTypeFeatures(np.append(np.mean(means, axis=0), np.mean(energies)),
                                            config.n_coeffs))
    return vectors


def export_features_csv(matrix: np.ndarray, path: str, metadata: Optional[pd.DataFrame] = None,
                        n_coeffs: int = 14) -> str:
    """Write keystroke feature rows with layout names as the header."""
    frame = pd.DataFrame(np.asarray(matrix, dtype=np.float64), columns=feature_names(n_coeffs))
    if metadata is not None:
        frame = pd.concat([metadata.reset_index(drop=True), frame], axis=1)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False)
    return path


def stack_features(rows: Sequence[KeystrokeFeatures]) -> np.ndarray:
    if not rows:
        return np.zeros((0, feature_length()))
    return np.vstack([row.values for row in rows])
