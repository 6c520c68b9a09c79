import numpy as np
import pytest

from src.core.preprocess import bandpass_audio
from src.core.segmentation import (
    EnergyTrace,
    PeakPickParams,
    detect_keystrokes,
    detect_starts,
    energy_trace,
    extract_segments,
)
from src.errors import ConfigError, EmptyInputError, RangeError
from src.models.metrics import segmentation_pr
from src.synth.generator import synth_session
from src.synth.signatures import SynthConfig


def _trace_with_bursts(onsets, length=1000):
    energies = np.zeros(length)
    for onset in onsets:
        energies[onset:onset + 5] = [10.0, 8.0, 6.0, 4.0, 2.0]
    return EnergyTrace(energies, window_ms=1.0, sample_rate=1000.0)


def test_energy_trace_drops_partial_window():
    trace = energy_trace(np.array([1.0, 1.0, 2.0, 2.0, 3.0]), 1000.0, window_ms=2.0)
    np.testing.assert_allclose(trace.energies, [2.0, 8.0])
    np.testing.assert_allclose(trace.times(), [0.0, 0.002])


def test_energy_trace_errors():
    with pytest.raises(EmptyInputError):
        energy_trace(np.zeros(0), 1000.0)
    with pytest.raises(ConfigError):
        energy_trace(np.ones(10), 1000.0, window_ms=0.4)


def test_detect_starts_finds_isolated_bursts():
    starts = detect_starts(_trace_with_bursts([200, 500, 800]))
    assert starts == pytest.approx([0.2, 0.5, 0.8])


def test_detect_starts_backtracks_to_the_rising_edge():
    trace = _trace_with_bursts([300])
    energies = trace.energies.copy()
    energies[298:300] = [6.0, 7.0]
    starts = detect_starts(EnergyTrace(energies, 1.0, 1000.0))
    assert starts == pytest.approx([0.298])


def test_detect_starts_enforces_min_gap():
    starts = detect_starts(_trace_with_bursts([200, 250, 400]), PeakPickParams(min_gap_ms=100.0))
    assert starts == pytest.approx([0.2, 0.4])
    assert all(b - a >= 0.1 - 1e-9 for a, b in zip(starts, starts[1:]))


def test_detect_starts_on_silence():
    assert detect_starts(EnergyTrace(np.zeros(500), 1.0, 1000.0)) == []


def test_peak_params_validation():
    with pytest.raises(ConfigError):
        PeakPickParams(min_gap_ms=0)
    with pytest.raises(ConfigError):
        PeakPickParams(backtrack_ratio=0.0)


def test_detects_synthetic_keystrokes():
    session = synth_session("typing words", SynthConfig(seed=3))
    filtered = session.with_audio(bandpass_audio(session.audio))
    starts = detect_keystrokes(filtered)
    precision, recall = segmentation_pr(starts, session.label_times(), 10.0)
    assert precision >= 0.9
    assert recall >= 0.9


def test_segments_have_fixed_length_and_zero_padding(session_factory):
    session = session_factory(1.0)
    segments = extract_segments(session, [0.0, 0.5, 1.0])
    audio_lengths = {s.audio.n_samples for s in segments}
    accel_lengths = {s.accel.n_samples for s in segments}
    assert audio_lengths == {1360}
    assert accel_lengths == {43}

    first = segments[0].audio.left
    assert np.all(first[:80] == 0.0)
    np.testing.assert_array_equal(first[80:], session.audio.left[:1280])
    middle = segments[1]
    np.testing.assert_array_equal(middle.audio.right, session.audio.right[7920:9280])
    assert np.all(segments[2].audio.left[80:] == 0.0)
    assert [s.index for s in segments] == [0, 1, 2]


def test_segment_range_errors(session_factory):
    session = session_factory(1.0)
    with pytest.raises(RangeError):
        extract_segments(session, [1.5])
    with pytest.raises(RangeError):
        extract_segments(session, [0.5, 0.2])
