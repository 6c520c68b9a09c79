"""
Data commands - synth, preprocess, segment, features
"""

import os
from dataclasses import replace
from typing import List, Optional

import pandas as pd
import typer

from src.automation.pipeline import preprocess_session, process_session
from src.core.features import export_features_csv
from src.core.segmentation import detect_keystrokes
from src.errors import IoError
from src.models.metrics import segmentation_pr
from src.storage.report_repo import write_csv_report
from src.storage.session_repo import load_session_dir, save_session
from src.synth.generator import synth_corpus, synth_keyboard_session, synth_session
from src.synth.signatures import SynthConfig, load_synth_config, noise_preset

from ..shared_utils import console, get_config, handle_errors, print_table, require_one


def _read_words(path: str) -> List[str]:
    if not os.path.isfile(path):
        raise IoError(f"word list not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return f.read().lower().split()


def synth(
    ctx: typer.Context,
    output_dir: str = typer.Argument(..., help="Session directory (or corpus root)"),
    text: Optional[str] = typer.Option(None, help="Type this text (a-z and spaces) in one session"),
    participants: int = typer.Option(0, help="Synthesize a key-drill corpus for N participants"),
    duration: Optional[float] = typer.Option(None, help="Random typing for this many seconds"),
    reps: int = typer.Option(5, help="Repetitions per key in corpus mode"),
    words_file: Optional[str] = typer.Option(None, help="Whitespace-separated words for corpus word sessions"),
    keyboard: Optional[str] = typer.Option(None, help="Keyboard class K1 | K2 | K3"),
    layout: Optional[str] = typer.Option(None, help="default | ablation | rate_study"),
    noise: Optional[str] = typer.Option(None, help="none | closed_office | open_office | cafeteria"),
    synth_config: Optional[str] = typer.Option(None, help="YAML generator config"),
    seed: Optional[int] = typer.Option(None, help="Override the seed"),
):
    """Generate labelled synthetic sessions."""
    mode = require_one(text=text, participants=participants, duration=duration)
    base = load_synth_config(synth_config) if synth_config else SynthConfig(seed=get_config(ctx).seed)
    overrides = {}
    if keyboard:
        overrides["keyboard_class"] = keyboard
    if layout:
        overrides["layout"] = layout
    if keyboard or layout:
        overrides["key_signatures"] = None
    if noise:
        overrides["noise"] = noise_preset(noise)
    if seed is not None:
        overrides["seed"] = seed
    config = replace(base, **overrides)

    if mode == "text":
        save_session(synth_session(text, config), output_dir)
        console.print(f"✅ Session written to {output_dir}")
    elif mode == "duration":
        save_session(synth_keyboard_session(config, duration), output_dir)
        console.print(f"✅ {config.keyboard_class} session ({duration:.0f} s) written to {output_dir}")
    else:
        words = _read_words(words_file) if words_file else None
        corpus = synth_corpus(participants, config, reps=reps, words=words)
        for item in corpus:
            save_session(item.session, os.path.join(output_dir, f"{item.participant}_{item.kind}"))
        console.print(f"✅ {len(corpus)} sessions written to {output_dir}")


def preprocess(
    ctx: typer.Context,
    session_dir: str = typer.Argument(..., help="Input session directory"),
    output_dir: str = typer.Argument(..., help="Filtered session directory"),
):
    """Bandpass the audio and lowpass the accelerometers."""
    config = get_config(ctx)
    session = load_session_dir(session_dir)
    save_session(preprocess_session(session, config), output_dir)
    console.print(f"✅ Filtered session written to {output_dir}")


def segment(
    ctx: typer.Context,
    session_dir: str = typer.Argument(..., help="Session directory"),
    output: str = typer.Option("starts.csv", help="CSV of detected start times"),
):
    """Detect keystroke start times."""
    config = get_config(ctx)
    session = load_session_dir(session_dir)
    seg = config.segmentation
    starts = detect_keystrokes(preprocess_session(session, config), seg.peak_params(), seg.window_ms)
    write_csv_report(pd.DataFrame({"start_time": starts}), output)
    console.print(f"✅ {len(starts)} keystrokes detected")
    if session.labels is not None:
        precision, recall = segmentation_pr(starts, session.label_times(), seg.match_tolerance_ms)
        print_table("Segmentation", [{"precision": precision, "recall": recall,
                                      "labels": len(session.labels), "detected": len(starts)}])


def features(
    ctx: typer.Context,
    session_dirs: List[str] = typer.Argument(..., help="Session directories"),
    output: str = typer.Option("features.csv", help="Feature CSV"),
    anchor: str = typer.Option("detected", help="Cut segments at 'detected' starts or at 'labels'"),
):
    """Per-keystroke MFCC/RMSE feature rows with energy ratio and TDoA."""
    config = get_config(ctx)
    frames, matrices = [], []
    for directory in session_dirs:
        processed = process_session(load_session_dir(directory), config, anchor)
        frames.append(pd.DataFrame({
            "participant": processed.participant,
            "start_time": processed.starts,
            "key": processed.keys if processed.keys is not None else "",
            "e_r": processed.e_r,
            "tdoa": processed.tdoa,
        }))
        matrices.append(processed.features)
    metadata = pd.concat(frames, ignore_index=True)
    matrix = pd.concat([pd.DataFrame(m) for m in matrices], ignore_index=True).to_numpy()
    export_features_csv(matrix, output, metadata, config.mfcc.n_coeffs)
    console.print(f"✅ {len(metadata)} feature rows written to {output}")


def register(app: typer.Typer):
    app.command()(handle_errors(synth))
    app.command()(handle_errors(preprocess))
    app.command()(handle_errors(segment))
    app.command()(handle_errors(features))
