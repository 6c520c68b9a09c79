import os

import pytest
from typer.testing import CliRunner

from src.cli.app import app, main
from src.storage.session_repo import load_session_dir

runner = CliRunner()


def test_version():
    result = runner.invoke(app, ["--version"])
    assert result.exit_code == 0
    assert "overhear 1.0.0" in result.output


def test_synth_text_then_segment(tmp_path):
    session_dir = str(tmp_path / "session")
    result = runner.invoke(app, ["synth", session_dir, "--text", "hi there", "--seed", "2"])
    assert result.exit_code == 0, result.output
    session = load_session_dir(session_dir)
    assert session.label_keys() == list("hithere")

    starts = str(tmp_path / "starts.csv")
    result = runner.invoke(app, ["segment", session_dir, "--output", starts])
    assert result.exit_code == 0, result.output
    assert os.path.isfile(starts)
    assert "precision" in result.output


def test_synth_needs_exactly_one_mode(tmp_path):
    result = runner.invoke(app, ["synth", str(tmp_path / "s")])
    assert result.exit_code == 1
    result = runner.invoke(app, ["synth", str(tmp_path / "s"), "--text", "a", "--participants", "2"])
    assert result.exit_code == 1


def test_words_command_ranks_dictionary_words():
    result = runner.invoke(app, ["words", "wo", "o", "r", "l", "d", "--top", "5"])
    assert result.exit_code == 0, result.output
    assert "world" in result.output


def test_words_command_rejects_non_letters():
    result = runner.invoke(app, ["words", "w1", "o"])
    assert result.exit_code == 1


def test_corrupted_bundle_is_a_data_error(tmp_path):
    bundle = tmp_path / "bundle.joblib"
    bundle.write_bytes(b"\x00garbage")
    session_dir = str(tmp_path / "session")
    assert runner.invoke(app, ["synth", session_dir, "--text", "ab"]).exit_code == 0
    result = runner.invoke(app, ["infer", session_dir, "--bundle", str(bundle),
                                 "--output", str(tmp_path / "out.json")])
    assert result.exit_code == 2


def test_unknown_study_is_a_config_error(tmp_path):
    result = runner.invoke(app, ["study", "telepathy", "--output-dir", str(tmp_path)])
    assert result.exit_code == 1


def test_missing_config_file(tmp_path):
    result = runner.invoke(app, ["--config", str(tmp_path / "none.yaml"), "words", "a"])
    assert result.exit_code == 2


def test_invalid_config_file(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("version: 7\n", encoding="utf-8")
    result = runner.invoke(app, ["--config", str(path), "words", "a"])
    assert result.exit_code == 1


@pytest.mark.parametrize("argv", [["--bogus"], ["synth"], ["no-such-command"]])
def test_main_maps_usage_errors_to_one(argv):
    assert main(argv) == 1
