import os

import numpy as np
import pytest

from src.automation.config import PipelineConfig
from src.automation.pipeline import process_session
from src.core.localization import GROUP_KEYS, HandGroup
from src.errors import ConfigError, DataError, IoError
from src.synth.generator import (
    key_drill_text,
    plan_presses,
    synth_corpus,
    synth_keyboard_session,
    synth_session,
)
from src.synth.signatures import (
    NOISE_PRESETS,
    HeadMotion,
    PressJitter,
    SynthConfig,
    ablation_config,
    default_signatures,
    layout_families,
    load_synth_config,
    noise_preset,
    rate_study_config,
)

CONFIGS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "configs")


def _fast(**kwargs):
    return SynthConfig(audio_rate=16000, **kwargs)


def test_same_seed_same_session():
    a = synth_session("hello", _fast(seed=3))
    b = synth_session("hello", _fast(seed=3))
    c = synth_session("hello", _fast(seed=4))
    np.testing.assert_array_equal(a.audio.left, b.audio.left)
    np.testing.assert_array_equal(a.accel.right, b.accel.right)
    assert a.labels == b.labels
    assert a.label_times() != c.label_times()


def test_labels_follow_the_text():
    session = synth_session("hello world", _fast(seed=1), participant="P07")
    assert "".join(session.label_keys()) == "helloworld"
    gaps = np.diff(session.label_times())
    assert np.all(gaps[:4] >= 0.15) and np.all(gaps[:4] <= 0.3)
    assert 0.8 <= gaps[4] <= 1.1
    assert session.meta.participant == "P07"
    assert session.meta.keyboard == "K1"
    assert session.duration == pytest.approx(session.label_times()[-1] + 0.4, abs=1e-3)
    assert np.max(np.abs(session.audio.left)) <= 1.0


def test_plan_presses_errors():
    rng = np.random.default_rng(0)
    with pytest.raises(ConfigError):
        plan_presses("hi!", SynthConfig(), rng)
    with pytest.raises(DataError):
        plan_presses("   ", SynthConfig(), rng)
    assert plan_presses(" a", SynthConfig(), rng)[0] == ("a", 0.3)


def test_energy_ratio_tracks_the_typing_hand():
    text = "a p r s k t d l y"
    processed = process_session(synth_session(text, _fast(seed=2)), PipelineConfig(), anchor="labels")
    expected = {HandGroup.G1: 0.8, HandGroup.G2: 0.2, HandGroup.G3: 0.5}
    for key, e_r in zip(processed.keys, processed.e_r):
        group = next(g for g, keys in GROUP_KEYS.items() if key in keys)
        assert e_r == pytest.approx(expected[group], abs=0.1), key


def test_key_drill_text():
    text = key_drill_text(2)
    assert len(text) == 52
    assert text.startswith("aabbcc") and text.endswith("zz")
    with pytest.raises(ConfigError):
        key_drill_text(0)


def test_corpus_layout():
    corpus = synth_corpus(2, _fast(seed=5), reps=1, words=["cat"])
    assert [(s.participant, s.kind) for s in corpus] == [
        ("P01", "keys"), ("P01", "words"), ("P02", "keys"), ("P02", "words"),
    ]
    assert corpus[1].text == "cat"
    assert len(corpus[0].session.labels) == 26
    with pytest.raises(ConfigError):
        synth_corpus(0)
    with pytest.raises(ConfigError):
        synth_corpus(1, _fast(seed=5), reps=1)
    with pytest.raises(ConfigError):
        synth_corpus(2, participant_seeds=[1])


def test_keyboard_session_uses_the_keyboard_class():
    session = synth_keyboard_session(_fast(keyboard_class="K3", seed=1), duration_s=3.0, participant="P02")
    assert session.meta.keyboard == "K3"
    assert session.duration <= 3.5
    assert len(session.labels) >= 5


def test_ablation_slot_mates_share_a_sound():
    signatures = default_signatures("K1", layout="ablation")
    for slot, family in enumerate(layout_families("ablation")):
        hands = {signatures[key].hand for key in family}
        assert len({signatures[key].hit for key in family}) == 1
        assert len(hands) == len(family)
    left, right = GROUP_KEYS[HandGroup.G1][0], GROUP_KEYS[HandGroup.G2][0]
    assert default_signatures("K1")[left].hit != default_signatures("K1")[right].hit
    # neighbouring slots are one pitch step apart
    g3 = GROUP_KEYS[HandGroup.G3]
    first, second = signatures[g3[0]].hit[0].freq_hz, signatures[g3[1]].hit[0].freq_hz
    assert second / first == pytest.approx(1.015)


def test_ablation_config_removes_the_audio_hand_cue():
    config = ablation_config(SynthConfig(seed=3))
    assert config.layout == "ablation"
    assert len(set(config.stereo_gains.values())) == 1
    assert set(config.tdoa_samples.values()) == {0}
    assert config.press_jitter.freq > SynthConfig().press_jitter.freq
    assert config.accel == SynthConfig().accel


def test_rate_study_families_differ_only_by_click():
    signatures = rate_study_config().key_signatures
    families = layout_families("rate_study")
    assert sorted(k for f in families for k in f) == sorted("abcdefghijklmnopqrstuvwxyz")
    assert max(len(f) for f in families) == 6
    for family in families:
        assert len({signatures[key].hit for key in family}) == 1
        clicks = [signatures[key].click_hz for key in family]
        assert len(set(clicks)) == len(family)
        assert all(8000.0 <= c <= 18000.0 for c in clicks)
    leaders = [signatures[f[0]].hit for f in families]
    assert len(set(leaders)) == len(families)


def test_press_jitter_varies_the_sound():
    steady = HeadMotion(gain_depth=0.0, tdoa_jitter_samples=0)
    still = PressJitter(0.0, 0.0, 0.0)
    a = synth_session("a", _fast(head_motion=steady, press_jitter=still, seed=4)).audio.left
    b = synth_session("a", _fast(head_motion=steady, press_jitter=still, seed=5)).audio.left
    np.testing.assert_array_equal(a, b)
    c = synth_session("a", _fast(head_motion=steady, seed=4)).audio.left
    d = synth_session("a", _fast(head_motion=steady, seed=5)).audio.left
    assert np.max(np.abs(c - d)) > 1e-3
    with pytest.raises(ConfigError):
        PressJitter(gain=-0.1)


def test_noise_presets():
    assert set(NOISE_PRESETS) == {"none", "closed_office", "open_office", "cafeteria"}
    assert noise_preset("cafeteria").snr_db < noise_preset("closed_office").snr_db
    with pytest.raises(ConfigError):
        noise_preset("stadium")


def test_load_shipped_synth_config(tmp_path):
    config = load_synth_config(os.path.join(CONFIGS, "synth_default.yaml"))
    assert config == SynthConfig()
    with pytest.raises(IoError):
        load_synth_config(str(tmp_path / "missing.yaml"))
    custom = tmp_path / "synth.yaml"
    custom.write_text("synth:\n  keyboard_class: K2\n  noise: open_office\n  seed: 9\n", encoding="utf-8")
    loaded = load_synth_config(str(custom))
    assert (loaded.keyboard_class, loaded.seed) == ("K2", 9)
    assert loaded.noise == noise_preset("open_office")
