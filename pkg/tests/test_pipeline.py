import numpy as np
import pytest

from src.automation.pipeline import build_dataset, group_words, preprocess_session, process_session
from src.core.signal_io import SensorSession
from src.errors import ConfigError, EmptyInputError


def _sessions(corpus, kind):
    return [s.session for s in corpus if s.kind == kind]


def test_detected_keystrokes_match_labels(small_corpus, fast_config):
    session = _sessions(small_corpus, "keys")[0]
    processed = process_session(session, fast_config)
    assert processed.precision >= 0.9
    assert processed.recall >= 0.9
    assert processed.features.shape == (len(processed), 170)
    assert processed.keys is not None and processed.keys.size == len(processed)
    assert len(processed) >= 0.9 * len(session.labels)
    assert np.all(np.isfinite(processed.e_r))
    assert processed.participant == "P01"


def test_label_anchor_keeps_every_press(small_corpus, fast_config):
    session = _sessions(small_corpus, "words")[0]
    processed = process_session(session, fast_config, anchor="labels")
    assert "".join(processed.keys) == "worldwater"
    np.testing.assert_allclose(processed.starts, session.label_times())
    assert processed.precision is None


def test_dataset_from_key_sessions(small_corpus, fast_config):
    dataset = build_dataset(_sessions(small_corpus, "keys"), fast_config, anchor="labels")
    assert dataset.participants() == ["P01", "P02"]
    assert len(dataset) == 2 * 26 * 3
    assert dataset.features.shape[1] == 170


def test_unlabelled_session(small_corpus, fast_config):
    labelled = _sessions(small_corpus, "words")[1]
    session = SensorSession(labelled.audio, labelled.accel, None, labelled.meta)
    processed = process_session(session, fast_config)
    assert processed.keys is None
    assert processed.precision is None
    assert len(processed) >= 9
    with pytest.raises(EmptyInputError):
        processed.to_dataset()


def test_bad_anchor(small_corpus, fast_config):
    with pytest.raises(ConfigError):
        process_session(_sessions(small_corpus, "words")[0], fast_config, anchor="peaks")


def test_preprocess_keeps_shapes(small_corpus, fast_config):
    session = _sessions(small_corpus, "words")[0]
    filtered = preprocess_session(session, fast_config)
    assert filtered.audio.n_samples == session.audio.n_samples
    assert filtered.labels == session.labels
    assert filtered.accel.left.shape == session.accel.left.shape


def test_group_words_splits_on_pauses():
    assert group_words([0.0, 0.2, 0.4, 1.5, 1.7], pause_ms=500.0) == [[0, 1, 2], [3, 4]]
    assert group_words([0.0, 0.5], pause_ms=500.0) == [[0], [1]]
    assert group_words([], pause_ms=500.0) == []
