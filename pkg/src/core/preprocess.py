"""
Preprocessing Module
Zero-phase Butterworth filtering for both modalities: a bandpass that keeps
the keystroke band of the audio and a lowpass that strips sensor hiss from
the accelerometers.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import signal as sps

from src.core.signal_io import DualAccel, StereoAudio
from src.errors import ConfigError

DEFAULT_AUDIO_BAND = (1200.0, 3800.0)
DEFAULT_ACCEL_CUTOFF = 100.0
DEFAULT_ORDER = 4


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    high_hz: float
    low_hz: Optional[float] = None
    order: int = DEFAULT_ORDER

    def __post_init__(self):
        if self.kind not in ("bandpass", "lowpass"):
            raise ConfigError(f"unknown filter kind {self.kind!r}")
        if int(self.order) != self.order or self.order < 1:
            raise ConfigError(f"filter order must be a positive integer, got {self.order}")
        if self.kind == "bandpass" and self.low_hz is None:
            raise ConfigError("bandpass filter needs low_hz")

    @classmethod
    def bandpass(cls, low_hz: float = DEFAULT_AUDIO_BAND[0], high_hz: float = DEFAULT_AUDIO_BAND[1],
                 order: int = DEFAULT_ORDER) -> "FilterSpec":
        return cls("bandpass", float(high_hz), float(low_hz), int(order))

    @classmethod
    def lowpass(cls, high_hz: float = DEFAULT_ACCEL_CUTOFF, order: int = DEFAULT_ORDER) -> "FilterSpec":
        return cls("lowpass", float(high_hz), None, int(order))

    def validate(self, sample_rate: float) -> None:
        """
        Check the band edges against the Nyquist frequency.

        Raises:
            ConfigError: edges outside (0, sample_rate / 2) or low >= high
        """
        nyquist = sample_rate / 2.0
        if self.kind == "bandpass":
            if not (0 < self.low_hz < self.high_hz < nyquist):
                raise ConfigError(
                    f"bandpass needs 0 < low ({self.low_hz}) < high ({self.high_hz}) < Nyquist ({nyquist})"
                )
        elif not (0 < self.high_hz < nyquist):
            raise ConfigError(f"lowpass needs 0 < cutoff ({self.high_hz}) < Nyquist ({nyquist})")


@lru_cache(maxsize=32)
def design_sos(spec: FilterSpec, sample_rate: float) -> np.ndarray:
    """Second-order sections for ``spec`` at ``sample_rate`` (validated)."""
    spec.validate(sample_rate)
    if spec.kind == "bandpass":
        sos = sps.butter(spec.order, [spec.low_hz, spec.high_hz], btype="bandpass",
                         output="sos", fs=sample_rate)
    else:
        sos = sps.butter(spec.order, spec.high_hz, btype="lowpass", output="sos", fs=sample_rate)
    return sos


def zero_phase(sos: np.ndarray, values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Forward-backward filtering; pad length shrinks for short inputs."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[axis]
    if n == 0:
        return values.copy()
    padlen = min(3 * (2 * sos.shape[0] + 1), n - 1)
    return sps.sosfiltfilt(sos, values, axis=axis, padlen=padlen)


def bandpass_audio(audio: StereoAudio, spec: Optional[FilterSpec] = None) -> StereoAudio:
    """
    Bandpass both channels identically (default 1200-3800 Hz).

    Raises:
        ConfigError: band does not fit below the audio Nyquist frequency
    """
    spec = spec or FilterSpec.bandpass()
    if spec.kind != "bandpass":
        raise ConfigError("bandpass_audio needs a bandpass FilterSpec")
    sos = design_sos(spec, float(audio.sample_rate))
    return StereoAudio(zero_phase(sos, audio.left), zero_phase(sos, audio.right), audio.sample_rate)


def lowpass_accel(accel: DualAccel, spec: Optional[FilterSpec] = None) -> DualAccel:
    """Lowpass all six axes identically (default 100 Hz cutoff)."""
    spec = spec or FilterSpec.lowpass()
    if spec.kind != "lowpass":
        raise ConfigError("lowpass_accel needs a lowpass FilterSpec")
    sos = design_sos(spec, accel.sample_rate)
    return DualAccel(zero_phase(sos, accel.left, axis=0), zero_phase(sos, accel.right, axis=0),
                     accel.sample_rate, accel.t0)
