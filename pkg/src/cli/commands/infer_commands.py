"""
Inference commands - infer, words
"""

from typing import List, Optional

import typer

from src.automation.job_executor import run_infer
from src.errors import ConfigError
from src.wordpred.dictionary import BUILTIN_DICTIONARY, load_dictionary
from src.wordpred.predictor import RANK_PROBABILITIES, predict_words
from src.wordpred.symspell import build_index

from ..shared_utils import console, get_config, handle_errors, print_table


def infer(
    ctx: typer.Context,
    session_dirs: List[str] = typer.Argument(..., help="Session directories to decode"),
    bundle: str = typer.Option(..., help="Model bundle from 'train'"),
    dictionary: Optional[str] = typer.Option(None, help="word<TAB>count file (default: built-in list)"),
    output: str = typer.Option("inference.json", help="JSON report"),
):
    """Rank keys per keystroke and words per keystroke group."""
    config = get_config(ctx) if ctx.obj and ctx.obj.config_path else None
    report = run_infer(session_dirs, bundle, dictionary, output, config)
    rows = []
    for session in report["sessions"]:
        best = [w["candidates"][0]["word"] if w["candidates"] else "?" for w in session["words"]]
        rows.append({"participant": session["participant"], "strokes": session["n_strokes"],
                     "fallback_rate": session["fallback_rate"], "text": " ".join(best)})
    print_table("Inference", rows, ["participant", "strokes", "fallback_rate", "text"])
    console.print(f"✅ Report written to {output}")


def parse_positions(tokens: List[str]) -> List[List[tuple]]:
    """
    ``["hj", "e", "lk"]`` -> per-position ranked letters with rank probabilities.

    Raises:
        ConfigError: a token with non a-z characters or more letters than ranks
    """
    positions = []
    for token in tokens:
        letters = token.lower()
        if not letters.isalpha() or not letters.isascii():
            raise ConfigError(f"position {token!r} must contain letters a-z only")
        if len(letters) > len(RANK_PROBABILITIES):
            raise ConfigError(f"position {token!r} has more than {len(RANK_PROBABILITIES)} candidates")
        positions.append(list(zip(letters, RANK_PROBABILITIES)))
    return positions


def words(
    ctx: typer.Context,
    positions: List[str] = typer.Argument(..., help="Candidate letters per position, best first (e.g. hj e lk lk op)"),
    dictionary: Optional[str] = typer.Option(None, help="word<TAB>count file (default: built-in list)"),
    top: int = typer.Option(10, help="Words to show"),
):
    """Rank dictionary words for per-position letter candidates."""
    config = get_config(ctx)
    w = config.words
    word_dict = load_dictionary(dictionary or w.dictionary or BUILTIN_DICTIONARY)
    index = build_index(word_dict, w.max_edit)
    candidates = predict_words(parse_positions(positions), index, top, w.beam_width, w.distance_first)
    print_table("Words", [{"rank": i + 1, "word": c.word, "frequency": c.frequency, "distance": c.distance}
                          for i, c in enumerate(candidates)])


def register(app: typer.Typer):
    app.command()(handle_errors(infer))
    app.command()(handle_errors(words))
