import math

import numpy as np
import pandas as pd
import pytest

from src.core.features import (
    KeyboardTypeFeatures,
    MfccConfig,
    channel_mfcc,
    export_features_csv,
    feature_names,
    frame_statistics,
    hz_to_mel,
    keyboard_type_features,
    keystroke_features,
    mel_filterbank,
    mel_to_hz,
    mfcc,
    skewness,
)
from src.core.signal_io import StereoAudio
from src.errors import ConfigError, InsufficientDataError, InsufficientFramesError, ShapeError

RATE = 16000


def _oracle_mfcc(frame, config, rate):
    """Textbook MFCC with explicit sums: DFT, triangular filters, natural log, orthonormal DCT-II."""
    n_fft = config.resolved_fft_size(rate)
    padded = np.zeros(n_fft)
    padded[:frame.size] = frame
    n_bins = n_fft // 2 + 1
    power = []
    for k in range(n_bins):
        re = sum(padded[n] * math.cos(2 * math.pi * k * n / n_fft) for n in range(n_fft))
        im = -sum(padded[n] * math.sin(2 * math.pi * k * n / n_fft) for n in range(n_fft))
        power.append((re * re + im * im) / n_fft)

    top_mel = 2595.0 * math.log10(1.0 + (rate / 2.0) / 700.0)
    points = [top_mel * i / (config.n_mel_filters + 1) for i in range(config.n_mel_filters + 2)]
    edges = [min(int(math.floor((n_fft + 1) * 700.0 * (10 ** (m / 2595.0) - 1.0) / rate)), n_bins - 1)
             for m in points]
    log_energies = []
    for i in range(1, config.n_mel_filters + 1):
        left, center, right = edges[i - 1], edges[i], edges[i + 1]
        energy = 0.0
        for j in range(n_bins):
            if left <= j < center:
                weight = (j - left) / (center - left)
            elif j == center:
                weight = 1.0
            elif center < j < right:
                weight = (right - j) / (right - center)
            else:
                weight = 0.0
            energy += weight * power[j]
        log_energies.append(math.log(max(energy, config.log_floor)))

    m = len(log_energies)
    coeffs = []
    for k in range(config.n_coeffs):
        scale = math.sqrt(1.0 / m) if k == 0 else math.sqrt(2.0 / m)
        coeffs.append(scale * sum(log_energies[n] * math.cos(math.pi * k * (2 * n + 1) / (2 * m))
                                  for n in range(m)))
    return np.array(coeffs)


def test_mel_scale_round_trip():
    hz = np.array([0.0, 700.0, 4000.0, 48000.0])
    np.testing.assert_allclose(mel_to_hz(hz_to_mel(hz)), hz, atol=1e-9)


def test_filterbank_shape_and_peaks():
    config = MfccConfig()
    fbank = mel_filterbank(config, float(RATE))
    assert fbank.shape == (26, config.resolved_fft_size(RATE) // 2 + 1)
    assert np.all(fbank >= 0)
    np.testing.assert_allclose(fbank.max(axis=1), 1.0)


def test_mfcc_matches_textbook_oracle(rng):
    config = MfccConfig()
    frame = rng.normal(size=config.frame_length(RATE)) * np.hamming(config.frame_length(RATE))
    np.testing.assert_allclose(mfcc(frame, config, RATE), _oracle_mfcc(frame, config, RATE), atol=1e-6)


@pytest.mark.slow
def test_mfcc_matches_oracle_on_100_frames(rng):
    config = MfccConfig()
    n = config.frame_length(RATE)
    window = np.hamming(n)
    for _ in range(100):
        frame = rng.normal(scale=rng.uniform(0.01, 10.0), size=n) * window
        np.testing.assert_allclose(mfcc(frame, config, RATE), _oracle_mfcc(frame, config, RATE),
                                   atol=1e-6)


def test_scaling_a_frame_only_moves_c0(rng):
    config = MfccConfig()
    frame = rng.normal(size=config.frame_length(RATE)) * np.hamming(config.frame_length(RATE))
    base = mfcc(frame, config, RATE)
    for alpha in (0.5, 3.0, 20.0):
        scaled = mfcc(alpha * frame, config, RATE)
        assert scaled[0] - base[0] == pytest.approx(2.0 * math.log(alpha) * math.sqrt(26), abs=1e-6)
        np.testing.assert_allclose(scaled[1:], base[1:], atol=1e-6)


def test_mfcc_of_silence_uses_the_log_floor():
    config = MfccConfig()
    coeffs = mfcc(np.zeros(160), config, RATE)
    assert coeffs[0] == pytest.approx(math.sqrt(26) * math.log(1e-10))
    np.testing.assert_allclose(coeffs[1:], 0.0, atol=1e-9)


def test_mfcc_rejects_frame_longer_than_fft():
    with pytest.raises(ShapeError):
        mfcc(np.ones(100), MfccConfig(fft_size=64), RATE)


def test_mfcc_config_validation():
    with pytest.raises(ConfigError):
        MfccConfig(n_coeffs=30)
    with pytest.raises(ConfigError):
        MfccConfig(frame_ms=5.0, hop_ms=10.0)


def test_channel_mfcc_frame_count(rng):
    # 85 ms at 16 kHz: 1360 samples, 160-sample frames every 80 samples
    coeffs = channel_mfcc(rng.normal(size=1360), MfccConfig(), RATE)
    assert coeffs.shape == (16, 14)


def test_skewness_of_constant_column_is_zero():
    matrix = np.column_stack([np.ones(5), [0.0, 0.0, 0.0, 0.0, 10.0]])
    skew = skewness(matrix)
    assert skew[0] == 0.0
    # deviations -2 x4 and 8: m2 = 16, m3 = 96
    assert skew[1] == pytest.approx(1.5)


def test_frame_statistics_is_coefficient_major():
    coeffs = np.array([[1.0, 10.0], [2.0, 20.0], [3.0, 30.0]])
    stats = frame_statistics(coeffs)
    np.testing.assert_allclose(stats[:6], [2.0, np.std([1, 2, 3]), 0.0, 3.0, 2.0, 1.0])
    np.testing.assert_allclose(stats[6:], [20.0, np.std([10, 20, 30]), 0.0, 30.0, 20.0, 10.0])


def test_keystroke_features_layout(rng, segment_factory):
    left, right = rng.normal(size=1360), 0.5 * rng.normal(size=1360)
    features = keystroke_features(segment_factory(left, right))
    assert features.values.shape == (170,)
    assert len(feature_names()) == 170
    expected_left = frame_statistics(channel_mfcc(left, MfccConfig(), RATE))
    np.testing.assert_allclose(features.left_block, expected_left)
    np.testing.assert_allclose(features.rmse_pair, [np.sqrt(np.mean(left ** 2)), np.sqrt(np.mean(right ** 2))])


def test_keystroke_features_swap_symmetry(rng, segment_factory):
    segment = segment_factory(rng.normal(size=1360), rng.normal(size=1360))
    a = keystroke_features(segment)
    b = keystroke_features(segment.swapped())
    np.testing.assert_allclose(a.left_block, b.right_block)
    np.testing.assert_allclose(a.right_block, b.left_block)
    np.testing.assert_allclose(a.rmse_pair, b.rmse_pair[::-1])


def test_silent_segment_gives_finite_features(segment_factory):
    features = keystroke_features(segment_factory(np.zeros(1360), np.zeros(1360)))
    assert np.all(np.isfinite(features.values))


def test_too_short_segment(segment_factory):
    with pytest.raises(InsufficientFramesError):
        keystroke_features(segment_factory(np.ones(200), np.ones(200)))


def test_keyboard_type_windows(rng):
    audio = StereoAudio(rng.normal(size=40000), rng.normal(size=40000), RATE)
    windows = keyboard_type_features(audio, window_s=1.0)
    assert len(windows) == 2
    assert all(w.values.shape == (7,) for w in windows)
    with pytest.raises(InsufficientDataError):
        keyboard_type_features(audio, window_s=3.0)


def test_keyboard_type_vector_has_fixed_length():
    assert KeyboardTypeFeatures(np.arange(7.0)).values.shape == (7,)
    for size in (2, 6, 8):
        with pytest.raises(ShapeError):
            KeyboardTypeFeatures(np.arange(float(size)))
    with pytest.raises(ShapeError):
        KeyboardTypeFeatures(np.ones((7, 1)))


def test_export_features_csv(tmp_path, rng):
    matrix = rng.normal(size=(3, 170))
    meta = pd.DataFrame({"participant": ["P01"] * 3, "key": list("abc")})
    path = export_features_csv(matrix, str(tmp_path / "out" / "features.csv"), meta)
    frame = pd.read_csv(path)
    assert list(frame.columns[:3]) == ["participant", "key", "left_c0_mean"]
    assert frame.shape == (3, 172)
