"""
Model commands - train, kbtype, eval
"""

from typing import List, Optional

import typer

from src.automation.job_executor import run_eval, run_train
from src.core.features import keyboard_type_features
from src.errors import ConfigError
from src.models.keyboard_type import predict_keyboard_type
from src.storage.model_repo import load_model_bundle
from src.storage.report_repo import write_json_report
from src.storage.session_repo import load_session_dir

from ..shared_utils import console, get_config, handle_errors, print_table


def train(
    ctx: typer.Context,
    session_dirs: List[str] = typer.Argument(..., help="Labelled session directories"),
    output: str = typer.Option("model.joblib", help="Model bundle path"),
    flat: bool = typer.Option(False, help="Also train the unclustered 26-class baseline"),
    keyboard_sessions: Optional[List[str]] = typer.Option(
        None, "--keyboard-session", help="Session directory for the keyboard-type model (repeatable)"),
    classifier: Optional[str] = typer.Option(None, help="forest | tree"),
    seed: Optional[int] = typer.Option(None, help="Override the seed"),
):
    """Train the per-group key models into a model bundle."""
    config = get_config(ctx, seed)
    if classifier:
        config.models.classifier = classifier
    bundle = run_train(session_dirs, config, output, flat, keyboard_sessions)
    console.print(f"✅ Bundle written to {output} (md5 {bundle.md5})")


def kbtype(
    ctx: typer.Context,
    session_dirs: List[str] = typer.Argument(..., help="Session directories"),
    bundle: str = typer.Option(..., help="Model bundle with a keyboard-type model"),
    output: Optional[str] = typer.Option(None, help="Optional JSON report"),
):
    """Infer the keyboard class of each session."""
    config = get_config(ctx)
    model_bundle = load_model_bundle(bundle)
    if model_bundle.keyboard_model is None:
        raise ConfigError(f"{bundle} has no keyboard-type model; train with --keyboard-session")
    mfcc = config.keyboard.mfcc(config.mfcc)
    rows = []
    for directory in session_dirs:
        session = load_session_dir(directory)
        windows = keyboard_type_features(session.audio, config.keyboard.window_s, mfcc)
        verdict = predict_keyboard_type(model_bundle.keyboard_model, windows)
        rows.append({"session": directory, **verdict})
    print_table("Keyboard type", rows, ["session", "keyboard", "windows"])
    if output:
        write_json_report({"config": config.to_dict(), "model_md5": model_bundle.md5, "sessions": rows}, output)


def eval_(
    ctx: typer.Context,
    session_dirs: List[str] = typer.Argument(..., help="Labelled session directories (two or more participants)"),
    output: str = typer.Option("eval.json", help="JSON report"),
    flat: bool = typer.Option(True, help="Include the unclustered baseline"),
    seed: Optional[int] = typer.Option(None, help="Override the seed"),
):
    """Leave-one-participant-out evaluation."""
    config = get_config(ctx, seed)
    report = run_eval(session_dirs, config, output, flat)
    print_table("LOOCV", report["participants"])


def register(app: typer.Typer):
    app.command()(handle_errors(train))
    app.command()(handle_errors(kbtype))
    app.command(name="eval")(handle_errors(eval_))
