import numpy as np
import pytest

from src.core.signal_io import (
    DualAccel,
    KeyLabel,
    SensorSession,
    SessionMeta,
    StereoAudio,
    median_frequency,
    resample,
)
from src.errors import AlignmentError, ConfigError, DataError, ShapeError


def test_stereo_audio_rejects_unequal_channels():
    with pytest.raises(ShapeError):
        StereoAudio(np.zeros(10), np.zeros(11), 16000)


def test_stereo_audio_rejects_bad_rate_and_nan():
    with pytest.raises(ConfigError):
        StereoAudio(np.zeros(10), np.zeros(10), 0)
    with pytest.raises(DataError):
        StereoAudio(np.array([0.0, np.nan]), np.zeros(2), 16000)


def test_stereo_audio_is_read_only_copy():
    source = np.zeros(4)
    audio = StereoAudio(source, np.zeros(4), 16000)
    source[0] = 1.0
    assert audio.left[0] == 0.0
    with pytest.raises(ValueError):
        audio.left[0] = 2.0


def test_swapped_exchanges_channels():
    audio = StereoAudio(np.ones(3), np.zeros(3), 8000)
    swapped = audio.swapped()
    assert np.all(swapped.left == 0) and np.all(swapped.right == 1)
    accel = DualAccel(np.ones((5, 3)), np.zeros((5, 3)), 100.0)
    assert np.all(accel.swapped().right == 1)


def test_dual_accel_needs_three_axes():
    with pytest.raises(ShapeError):
        DualAccel(np.zeros((5, 2)), np.zeros((5, 2)), 100.0)


def test_key_label_validation():
    KeyLabel("q", 0.0)
    with pytest.raises(DataError):
        KeyLabel("A", 1.0)
    with pytest.raises(DataError):
        KeyLabel("a", -0.5)


def test_session_meta_keyboard_values():
    with pytest.raises(DataError):
        SessionMeta("P01", "K9")


def test_alignment_tolerance():
    audio = StereoAudio(np.zeros(1000), np.zeros(1000), 1000)
    SensorSession(audio, DualAccel(np.zeros((104, 3)), np.zeros((104, 3)), 100.0))
    with pytest.raises(AlignmentError):
        SensorSession(audio, DualAccel(np.zeros((110, 3)), np.zeros((110, 3)), 100.0))


def test_labels_must_be_sorted():
    audio = StereoAudio(np.zeros(1000), np.zeros(1000), 1000)
    accel = DualAccel(np.zeros((100, 3)), np.zeros((100, 3)), 100.0)
    with pytest.raises(DataError):
        SensorSession(audio, accel, (KeyLabel("a", 0.5), KeyLabel("b", 0.2)))


def test_resample_length_and_identity():
    audio = StereoAudio(np.zeros(9600), np.zeros(9600), 96000)
    assert resample(audio, 96000) is audio
    assert resample(audio, 48000).n_samples == 4800
    assert resample(audio, 16000).n_samples == 1600
    assert resample(audio, 44100).n_samples == 4410


def test_resample_keeps_in_band_tone():
    t96 = np.arange(96000) / 96000
    audio = StereoAudio(np.sin(2 * np.pi * 1000 * t96), np.cos(2 * np.pi * 1000 * t96), 96000)
    out = resample(audio, 16000)
    t16 = np.arange(16000) / 16000
    interior = slice(200, -200)
    np.testing.assert_allclose(out.left[interior], np.sin(2 * np.pi * 1000 * t16)[interior], atol=0.02)
    np.testing.assert_allclose(out.right[interior], np.cos(2 * np.pi * 1000 * t16)[interior], atol=0.02)


@pytest.mark.parametrize("rate", [0, -8000, 22050.5, None])
def test_resample_rejects_bad_rate(rate):
    audio = StereoAudio(np.zeros(100), np.zeros(100), 8000)
    with pytest.raises(ConfigError):
        resample(audio, rate)


def test_median_frequency_of_a_tone():
    t = np.arange(5000) / 500.0
    assert median_frequency(np.sin(2 * np.pi * 5.0 * t), 500.0) == pytest.approx(5.0, abs=0.2)
    assert median_frequency(np.ones(100), 500.0) == 0.0
