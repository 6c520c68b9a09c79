"""
Shared fixtures: small hand-built sessions and a cached synthetic corpus.
"""

import numpy as np
import pytest

from src.automation.config import create_config
from src.core.segmentation import KeystrokeSegment
from src.core.signal_io import DualAccel, KeyLabel, SensorSession, SessionMeta, StereoAudio
from src.synth.generator import synth_corpus
from src.synth.signatures import SynthConfig

AUDIO_RATE = 16000
ACCEL_RATE = 500.0


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_session(duration_s: float = 1.0, audio_rate: int = AUDIO_RATE, accel_rate: float = ACCEL_RATE,
                 labels=None, participant: str = "P01", seed: int = 0) -> SensorSession:
    """Low-level noise on every stream, gravity on both z axes."""
    gen = np.random.default_rng(seed)
    n = int(round(duration_s * audio_rate))
    m = int(round(duration_s * accel_rate))
    audio = StereoAudio(gen.normal(0, 0.01, n), gen.normal(0, 0.01, n), audio_rate)
    left = gen.normal(0, 0.002, (m, 3))
    right = gen.normal(0, 0.002, (m, 3))
    left[:, 2] += 1.0
    right[:, 2] += 1.0
    labels = tuple(KeyLabel(k, t) for k, t in labels) if labels is not None else None
    return SensorSession(audio, DualAccel(left, right, accel_rate), labels, SessionMeta(participant, "K1"))


def make_segment(left: np.ndarray, right: np.ndarray, sample_rate: int = AUDIO_RATE,
                 accel_left=None, accel_right=None, accel_rate: float = ACCEL_RATE) -> KeystrokeSegment:
    if accel_left is None:
        accel_left = np.zeros((43, 3))
    if accel_right is None:
        accel_right = np.zeros_like(accel_left)
    return KeystrokeSegment(0.0, StereoAudio(left, right, sample_rate),
                            DualAccel(accel_left, accel_right, accel_rate), 0)


@pytest.fixture
def session_factory():
    return make_session


@pytest.fixture
def segment_factory():
    return make_segment


@pytest.fixture
def fast_config():
    """Default pipeline with small forests."""
    return create_config(models={"n_trees": 15})


@pytest.fixture(scope="session")
def small_corpus():
    """Two participants, every key three times, plus a short word session each."""
    return synth_corpus(2, SynthConfig(seed=7), reps=3, words=["world", "water"])
