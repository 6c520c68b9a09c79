import os

import pytest

from src.automation.config import ConfigManager, PipelineConfig, create_config
from src.errors import ConfigError, IoError

CONFIGS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "configs")


def test_defaults_are_valid():
    config = PipelineConfig()
    assert ConfigManager().validate_config(config) == []
    assert config.filters.audio_low_hz == 1200.0
    assert config.segmentation.post_ms == 80.0
    assert config.clustering.lam == 0.5
    assert config.words.beam_width == 500


def test_save_and_load_round_trip(tmp_path):
    manager = ConfigManager(str(tmp_path))
    config = create_config(seed=11, clustering={"gamma": 0.08}, models={"n_trees": 40})
    path = manager.save_config(config, "experiment")
    assert path == os.path.join(str(tmp_path), "experiment.yaml")
    assert manager.load_config("experiment") == config
    assert manager.list_configs() == ["experiment"]


def test_missing_config_is_none(tmp_path):
    assert ConfigManager(str(tmp_path)).load_config("absent") is None


@pytest.mark.parametrize("content", [
    "version: 2\n",
    "seed: [unclosed\n",
    "- just\n- a list\n",
    "filters: 3\n",
    "models:\n  classifier: svm\n",
])
def test_invalid_files_raise_config_error(tmp_path, content):
    path = tmp_path / "bad.yaml"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigError):
        ConfigManager(str(tmp_path)).load_config(str(path))


def test_unknown_keys_are_ignored(tmp_path):
    path = tmp_path / "extra.yaml"
    path.write_text("seed: 4\ncolour: blue\nwords:\n  max_edit: 1\n  shout: true\n", encoding="utf-8")
    config = ConfigManager(str(tmp_path)).load_config(str(path))
    assert config.seed == 4
    assert config.words.max_edit == 1


def test_load_or_default(tmp_path, monkeypatch):
    manager = ConfigManager(str(tmp_path))
    monkeypatch.delenv("OVERHEAR_SEED", raising=False)
    assert manager.load_or_default() == PipelineConfig()
    with pytest.raises(IoError):
        manager.load_or_default(str(tmp_path / "nope.yaml"))

    monkeypatch.setenv("OVERHEAR_SEED", "42")
    assert manager.load_or_default().seed == 42
    monkeypatch.setenv("OVERHEAR_SEED", "forty-two")
    with pytest.raises(ConfigError):
        manager.load_or_default()


def test_create_config_rejects_invalid_values(tmp_path):
    with pytest.raises(ConfigError):
        create_config(models={"classifier": "svm"})
    with pytest.raises(ConfigError):
        create_config(filters={"audio_low_hz": 4000.0})
    with pytest.raises(ConfigError):
        create_config(words={"max_edit": 5})
    create_config("saved", config_dir=str(tmp_path), seed=3)
    assert ConfigManager(str(tmp_path)).load_config("saved").seed == 3


def test_shipped_default_config_matches_defaults(monkeypatch):
    monkeypatch.delenv("OVERHEAR_SEED", raising=False)
    config = ConfigManager(CONFIGS).load_config("default")
    assert config == PipelineConfig()
