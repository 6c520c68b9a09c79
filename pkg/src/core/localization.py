"""
Localization Module
Two ways of telling which side a keystroke came from:

- TDoA between the two microphones (cross-correlation lag). Kept as a
  diagnostic only; under head motion it spreads too widely to be useful.
- Left/right accelerometer energy ratio on the z axis, which drives the
  G1 / G2 / G3 hand grouping used by the key classifiers.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Iterable, Optional

import numpy as np
from scipy import signal as sps

from src.core.segmentation import KeystrokeSegment
from src.errors import ConfigError, DegenerateSignalError, EmptyInputError, StateError


class HandGroup(str, Enum):
    G1 = "G1"  # left hand
    G2 = "G2"  # right hand
    G3 = "G3"  # middle of the keyboard / ambiguous


GROUP_KEYS: Dict[HandGroup, str] = {
    HandGroup.G1: "asdzxqw",
    HandGroup.G2: "opklnmij",
    HandGroup.G3: "rtyufghvbce",
}
GROUP_ORDER = (HandGroup.G1, HandGroup.G2, HandGroup.G3)
KEY_TO_GROUP: Dict[str, HandGroup] = {
    key: group for group, keys in GROUP_KEYS.items() for key in keys
}
ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def group_of_key(key: str) -> HandGroup:
    try:
        return KEY_TO_GROUP[key]
    except KeyError:
        raise ConfigError(f"no hand group for key {key!r}") from None


@dataclass(frozen=True)
class ClusterThresholds:
    """epsilon guards the ratio, gamma is the half-width of the G3 band, lam the fallback threshold."""
    epsilon: float = 1e-12
    gamma: float = 0.05
    lam: float = 0.5
    e_med: Optional[float] = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= self.gamma < 0.5:
            raise ConfigError(f"gamma must lie in [0, 0.5), got {self.gamma}")
        if not 0 <= self.lam <= 1:
            raise ConfigError(f"lambda must lie in [0, 1], got {self.lam}")

    def with_median(self, e_med: float) -> "ClusterThresholds":
        return replace(self, e_med=float(e_med))


# ============================================================================
# TDoA
# ============================================================================

def tdoa(segment: KeystrokeSegment, max_lag: int) -> int:
    """
    Lag k in [-max_lag, max_lag] maximizing sum_n S1[n] * S2[n + k].

    S1 is the left channel, S2 the right; a positive lag means the sound
    reached the left microphone first.

    Raises:
        ConfigError: max_lag negative or not shorter than the segment
        DegenerateSignalError: either channel carries no energy
    """
    s1 = segment.audio.left
    s2 = segment.audio.right
    n = s1.size
    if max_lag < 0 or max_lag >= n:
        raise ConfigError(f"max_lag must lie in [0, {n}), got {max_lag}")
    if not np.any(s1) or not np.any(s2):
        raise DegenerateSignalError("TDoA undefined for a zero-energy channel")

    corr = sps.correlate(s2, s1, mode="full", method="auto")
    lags = sps.correlation_lags(s2.size, s1.size, mode="full")
    mask = np.abs(lags) <= max_lag
    return int(lags[mask][np.argmax(corr[mask])])


# ============================================================================
# ENERGY RATIO CLUSTERING
# ============================================================================

def _centered_energy(values: np.ndarray) -> float:
    centered = values - values.mean()
    return float(np.dot(centered, centered))


def energy_ratio(segment: KeystrokeSegment, thresholds: ClusterThresholds = ClusterThresholds()) -> float:
    """E_left / (E_left + E_right + epsilon) over the mean-removed z axes."""
    accel = segment.accel
    if accel.n_samples == 0:
        raise EmptyInputError("segment has no accelerometer samples")
    e_left = _centered_energy(accel.left_z)
    e_right = _centered_energy(accel.right_z)
    return e_left / (e_left + e_right + thresholds.epsilon)


def median_energy_ratio(ratios: Iterable[float]) -> float:
    values = np.asarray(list(ratios), dtype=np.float64)
    if values.size == 0:
        raise EmptyInputError("median of an empty ratio list")
    return float(np.median(values))


def assign_group(e_r: float, thresholds: ClusterThresholds) -> HandGroup:
    """
    G3 inside the band |e_r - e_med| <= gamma, else G1 above the median and G2 below.

    Raises:
        StateError: thresholds carry no median yet
    """
    if thresholds.e_med is None:
        raise StateError("median energy ratio not set; compute it from the victim's keystrokes first")
    if abs(e_r - thresholds.e_med) <= thresholds.gamma:
        return HandGroup.G3
    return HandGroup.G1 if e_r > thresholds.e_med else HandGroup.G2
