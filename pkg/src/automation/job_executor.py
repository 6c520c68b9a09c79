"""
Job Executor
Orchestrates the end-to-end jobs behind the CLI: training a model bundle,
running inference on unlabeled sessions and evaluating with LOOCV.
Every report embeds the resolved config for provenance.
"""

import logging
from datetime import datetime
from typing import Dict, List, Optional, Sequence

import numpy as np

from src import __version__
from src.automation.config import PipelineConfig
from src.automation.pipeline import (
    ProcessedSession,
    build_dataset,
    group_words,
    make_flat_trainer,
    make_trainer,
    process_session,
    run_loocv,
)
from src.core.features import keyboard_type_features
from src.core.localization import median_energy_ratio
from src.core.signal_io import SensorSession
from src.errors import InsufficientDataError
from src.models.grouping import GroupModelSet, predict_key_batch
from src.models.keyboard_type import predict_keyboard_type, train_keyboard_type_model
from src.models.metrics import misclassification_distances, summarize_topk, top1_keys, typing_speed_wpm
from src.storage.model_repo import ModelBundle, load_model_bundle, save_model_bundle
from src.storage.report_repo import write_json_report
from src.storage.session_repo import load_session_dir
from src.wordpred.dictionary import BUILTIN_DICTIONARY, load_dictionary
from src.wordpred.predictor import predict_words
from src.wordpred.symspell import build_index

logger = logging.getLogger(__name__)

KEY_REPORT_LIMIT = 10


def log(message: str):
    """Loguje wiadomość (timestamp dodaje handler)."""
    logger.info(message)


def _load_sessions(session_dirs: Sequence[str]) -> List[SensorSession]:
    sessions = [load_session_dir(d) for d in session_dirs]
    log(f"📂 Loaded {len(sessions)} session(s)")
    return sessions


def _keyboard_windows(sessions: Sequence[SensorSession], config: PipelineConfig):
    mfcc = config.keyboard.mfcc(config.mfcc)
    windows, labels = [], []
    for session in sessions:
        try:
            vectors = keyboard_type_features(session.audio, config.keyboard.window_s, mfcc)
        except InsufficientDataError:
            logger.warning("session of %s is shorter than one keyboard window, skipped",
                           session.meta.participant)
            continue
        windows.extend(vectors)
        labels.extend([session.meta.keyboard] * len(vectors))
    return windows, labels


# ============================================================================
# TRAIN
# ============================================================================

def train_bundle(sessions: Sequence[SensorSession], config: PipelineConfig,
                 with_flat: bool = False,
                 keyboard_sessions: Optional[Sequence[SensorSession]] = None) -> ModelBundle:
    """Group models (and optionally the flat baseline and keyboard-type model) from labelled sessions."""
    dataset = build_dataset(sessions, config, progress=True)
    log(f"🧮 Training on {len(dataset)} keystrokes from {len(dataset.participants())} participant(s)")
    group_models = make_trainer(config)(dataset)
    flat_model = make_flat_trainer(config)(dataset) if with_flat else None
    keyboard_model = None
    if keyboard_sessions:
        windows, labels = _keyboard_windows(keyboard_sessions, config)
        k = config.keyboard
        keyboard_model = train_keyboard_type_model(windows, labels, k.learning_rate, k.l2, k.max_iter, k.tol)
    return ModelBundle(group_models, config.to_dict(), flat_model, keyboard_model,
                       datetime.now().isoformat(timespec="seconds"))


def run_train(session_dirs: Sequence[str], config: PipelineConfig, bundle_path: str,
              with_flat: bool = False, keyboard_dirs: Optional[Sequence[str]] = None) -> ModelBundle:
    log(f"🚀 Training job -> {bundle_path}")
    sessions = _load_sessions(session_dirs)
    keyboard_sessions = _load_sessions(keyboard_dirs) if keyboard_dirs else None
    bundle = train_bundle(sessions, config, with_flat, keyboard_sessions)
    save_model_bundle(bundle, bundle_path)
    log("✅ Training finished")
    return bundle


# ============================================================================
# INFER
# ============================================================================

def infer_session(session: SensorSession, models: GroupModelSet, index, config: PipelineConfig,
                  keyboard_model=None) -> Dict:
    """Ranked keys per keystroke and ranked words per pause-delimited keystroke group."""
    processed: ProcessedSession = process_session(session, config)
    words_cfg = config.words
    report: Dict = {
        "participant": session.meta.participant,
        "n_strokes": len(processed),
        "e_med": None,
        "fallback_rate": 0.0,
        "strokes": [],
        "words": [],
        "timing": {
            "duration_s": session.duration,
            "typing_speed_wpm": typing_speed_wpm(processed.starts.tolist()),
            "mean_gap_ms": float(np.mean(np.diff(processed.starts)) * 1000.0) if len(processed) > 1 else None,
        },
    }
    if keyboard_model is not None:
        try:
            windows = keyboard_type_features(session.audio, config.keyboard.window_s,
                                             config.keyboard.mfcc(config.mfcc))
            report["keyboard"] = predict_keyboard_type(keyboard_model, windows)
        except InsufficientDataError:
            report["keyboard"] = None
    if len(processed) == 0:
        log(f"⚠️  No keystrokes detected for {session.meta.participant}")
        return report

    e_med = median_energy_ratio(processed.e_r)
    predictions = predict_key_batch(processed.features, processed.e_r, models.with_median(e_med))
    report["e_med"] = e_med
    report["fallback_rate"] = float(np.mean([p.fallback_used for p in predictions]))

    for i, prediction in enumerate(predictions):
        stroke = {
            "index": i,
            "start_time": float(processed.starts[i]),
            "e_r": float(processed.e_r[i]),
            "tdoa": None if np.isnan(processed.tdoa[i]) else int(processed.tdoa[i]),
            **prediction.to_dict(KEY_REPORT_LIMIT),
        }
        if processed.keys is not None:
            stroke["truth"] = str(processed.keys[i])
        report["strokes"].append(stroke)

    for members in group_words(processed.starts, words_cfg.word_pause_ms):
        topk = [predictions[i].ranked[:words_cfg.top_k_letters] for i in members]
        candidates = predict_words(topk, index, words_cfg.top_w, words_cfg.beam_width, words_cfg.distance_first)
        entry = {
            "strokes": members,
            "letters": "".join(predictions[i].top_key for i in members),
            "candidates": [{"word": c.word, "frequency": c.frequency, "distance": c.distance}
                           for c in candidates],
        }
        if processed.keys is not None:
            entry["truth"] = "".join(str(processed.keys[i]) for i in members)
        report["words"].append(entry)

    if processed.keys is not None:
        truth = processed.keys.tolist()
        report["accuracy"] = {
            **summarize_topk(predictions, truth),
            "precision": processed.precision,
            "recall": processed.recall,
            "misclassification": misclassification_distances(top1_keys(predictions), truth),
        }
    return report


def run_infer(session_dirs: Sequence[str], bundle_path: str, dictionary_path: Optional[str],
              output_path: str, config: Optional[PipelineConfig] = None) -> Dict:
    """
    Wykonuje inferencję i zapisuje raport JSON.

    Raises:
        IoError: a session, the bundle or the dictionary is missing
        CompatError: bundle unreadable or of another version
    """
    log(f"🚀 Inference job: {len(session_dirs)} session(s)")
    bundle = load_model_bundle(bundle_path)
    if config is None:
        config = PipelineConfig.from_dict(bundle.config)
    dictionary_path = dictionary_path or config.words.dictionary or BUILTIN_DICTIONARY
    dictionary = load_dictionary(dictionary_path)
    index = build_index(dictionary, config.words.max_edit)
    log(f"📖 Dictionary: {len(dictionary)} words, max edit {config.words.max_edit}")

    sessions = [infer_session(s, bundle.group_models, index, config, bundle.keyboard_model)
                for s in _load_sessions(session_dirs)]
    n_strokes = sum(s["n_strokes"] for s in sessions)
    fallbacks = sum(s["fallback_rate"] * s["n_strokes"] for s in sessions)
    report = {
        "tool_version": __version__,
        "generated_at": datetime.now().isoformat(timespec="seconds"),
        "config": config.to_dict(),
        "model": {"path": bundle_path, "md5": bundle.md5, "created_at": bundle.created_at},
        "dictionary": {"path": dictionary_path, "words": len(dictionary)},
        "summary": {"n_strokes": n_strokes, "fallback_rate": fallbacks / n_strokes if n_strokes else 0.0},
        "sessions": sessions,
    }
    write_json_report(report, output_path)
    log(f"✅ Inference finished: {n_strokes} keystroke(s)")
    return report


# ============================================================================
# EVAL
# ============================================================================

def run_eval(session_dirs: Sequence[str], config: PipelineConfig, output_path: str,
             with_flat: bool = True) -> Dict:
    """Leave-one-participant-out evaluation report."""
    log(f"🚀 LOOCV evaluation on {len(session_dirs)} session(s)")
    dataset = build_dataset(_load_sessions(session_dirs), config, progress=True)
    result = run_loocv(dataset, config, with_flat=with_flat, progress=True)
    predicted = [key for victim in result.predictions for key in top1_keys(result.predictions[victim])]
    truth = [key for victim in result.truth for key in result.truth[victim]]
    report = {
        "tool_version": __version__,
        "generated_at": datetime.now().isoformat(timespec="seconds"),
        "config": config.to_dict(),
        **result.to_dict(),
        "misclassification": misclassification_distances(predicted, truth),
    }
    write_json_report(report, output_path)
    log(f"✅ Evaluation finished: top-1 {report['aggregate'].get('top1', float('nan')):.3f}")
    return report
