"""
Studies
Reproducible experiments over synthetic corpora. Each study writes
``<study>.csv``, ``<study>.png`` and ``<study>.md`` into the output directory.

    sampling_rate  top-k per keyboard class at 96 / 48 / 16 kHz
    ablation       clustered pipeline vs one 26-class model
    noise          segmentation and top-k under ambient noise presets
    kbtype         keyboard-type classification on held-out sessions
    models         random forest vs single decision tree
    words          word prediction under corrupted letter rankings
"""

import logging
import os
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from src.automation.config import PipelineConfig
from src.automation.pipeline import build_dataset, process_session, run_loocv
from src.core.features import keyboard_type_features
from src.core.preprocess import FilterSpec
from src.core.signal_io import SensorSession, resample
from src.errors import ConfigError
from src.models.keyboard_type import KEYBOARD_CLASSES, predict_keyboard_windows, train_keyboard_type_model
from src.models.metrics import per_class_precision_recall
from src.models.training import KeystrokeDataset
from src.reporting.report_generator import PlotSpec, generate_markdown_report, plot_study
from src.storage.report_repo import write_csv_report
from src.synth.generator import synth_corpus, synth_keyboard_session
from src.synth.signatures import NOISE_PRESETS, SynthConfig, ablation_config, noise_preset, rate_study_config
from src.wordpred.dictionary import BUILTIN_DICTIONARY, load_dictionary
from src.wordpred.predictor import corrupt_topk, naive_dictionary_match, predict_words, top_k_word_accuracy
from src.wordpred.symspell import build_index

logger = logging.getLogger(__name__)

SAMPLING_RATES = (96000, 48000, 16000)
STUDY_BAND = (1200.0, 20000.0)
NYQUIST_MARGIN = 0.45
WORD_KS = (1, 10, 50, 100)


@dataclass(frozen=True)
class StudySettings:
    participants: int = 3
    reps: int = 5
    n_trees: Optional[int] = None  # None -> config value
    kb_window_s: Optional[float] = None
    kb_train_sessions: int = 3
    kb_test_sessions: int = 2
    kb_windows_per_session: int = 3
    n_words: int = 300


FULL = StudySettings()
QUICK = StudySettings(reps=3, n_trees=30, kb_window_s=5.0, kb_train_sessions=2, kb_test_sessions=1,
                      kb_windows_per_session=2, n_words=60)


@dataclass
class StudyReport:
    name: str
    table: pd.DataFrame
    csv_path: str
    plot_path: str
    markdown_path: str


def _study_config(config: PipelineConfig, settings: StudySettings) -> PipelineConfig:
    if settings.n_trees is None:
        return config
    return replace(config, models=replace(config.models, n_trees=settings.n_trees))


def _key_sessions(synth: SynthConfig, settings: StudySettings) -> List[SensorSession]:
    corpus = synth_corpus(settings.participants, synth, reps=settings.reps)
    return [item.session for item in corpus if item.kind == "keys"]


def _loocv_scores(sessions: Sequence[SensorSession], config: PipelineConfig,
                  audio_spec: Optional[FilterSpec] = None, with_flat: bool = False) -> Dict[str, float]:
    dataset = build_dataset(sessions, config, audio_spec=audio_spec)
    return run_loocv(dataset, config, with_flat=with_flat).aggregate()


# ============================================================================
# STUDIES
# ============================================================================

def sampling_rate_study(config: PipelineConfig, settings: StudySettings) -> Tuple[pd.DataFrame, PlotSpec]:
    """Keys differ only by a faint high-frequency click that lower rates cannot carry."""
    rows = []
    for keyboard in tqdm(KEYBOARD_CLASSES, desc="Keyboards"):
        synth = rate_study_config(SynthConfig(keyboard_class=keyboard, seed=config.seed))
        sessions = _key_sessions(synth, settings)
        for rate in SAMPLING_RATES:
            high = min(STUDY_BAND[1], NYQUIST_MARGIN * rate)
            spec = FilterSpec.bandpass(STUDY_BAND[0], high, config.filters.order)
            resampled = [s.with_audio(resample(s.audio, rate)) for s in sessions]
            scores = _loocv_scores(resampled, config, spec)
            rows.append({"keyboard": keyboard, "rate_hz": rate, "band_high_hz": high,
                         "top1": scores["top1"], "top5": scores["top5"]})
            logger.info("%s @ %d Hz: top-5 %.3f", keyboard, rate, scores["top5"])
    return pd.DataFrame(rows), PlotSpec(x="rate_hz", hue="keyboard", metric="top5",
                                        title="Top-5 key accuracy vs sampling rate")


def _routed_only(config: PipelineConfig) -> PipelineConfig:
    """lambda = 0 keeps every keystroke in the group it was routed to."""
    return replace(config, clustering=replace(config.clustering, lam=0.0))


def ablation_study(config: PipelineConfig, settings: StudySettings) -> Tuple[pd.DataFrame, PlotSpec]:
    """
    Keys in the same slot of each hand group share one sound, so only the
    side-channel grouping tells them apart. ``clustered`` classifies inside the
    routed group; ``clustered_fallback`` also lets a more confident group take
    over below the configured lambda.
    """
    rows = []
    for keyboard in tqdm(KEYBOARD_CLASSES, desc="Keyboards"):
        synth = ablation_config(SynthConfig(keyboard_class=keyboard, seed=config.seed))
        dataset = build_dataset(_key_sessions(synth, settings), config)
        routed = run_loocv(dataset, _routed_only(config), with_flat=True).aggregate()
        fallback = run_loocv(dataset, config).aggregate()
        rows.append({"keyboard": keyboard, "pipeline": "clustered",
                     "top1": routed["top1"], "top5": routed["top5"]})
        rows.append({"keyboard": keyboard, "pipeline": "clustered_fallback",
                     "top1": fallback["top1"], "top5": fallback["top5"]})
        rows.append({"keyboard": keyboard, "pipeline": "unclustered",
                     "top1": routed["flat_top1"], "top5": routed["flat_top5"]})
        logger.info("%s: clustered top-5 %.3f, unclustered %.3f", keyboard, routed["top5"], routed["flat_top5"])
    return pd.DataFrame(rows), PlotSpec(x="keyboard", hue="pipeline", metric="top5",
                                        title="Top-5 key accuracy with and without hand clustering")


def noise_study(config: PipelineConfig, settings: StudySettings) -> Tuple[pd.DataFrame, PlotSpec]:
    rows = []
    for preset in tqdm(NOISE_PRESETS, desc="Noise"):
        synth = SynthConfig(seed=config.seed, noise=noise_preset(preset))
        processed = [process_session(s, config) for s in _key_sessions(synth, settings)]
        dataset = KeystrokeDataset.concat([p.to_dataset() for p in processed])
        scores = run_loocv(dataset, config).aggregate()
        rows.append({
            "noise": preset,
            "precision": float(np.mean([p.precision for p in processed])),
            "recall": float(np.mean([p.recall for p in processed])),
            "top1": scores["top1"],
            "top5": scores["top5"],
        })
        logger.info("%s: precision %.3f recall %.3f", preset, rows[-1]["precision"], rows[-1]["recall"])
    return pd.DataFrame(rows), PlotSpec(x="noise", metric="top5", title="Top-5 key accuracy under ambient noise")


def _keyboard_windows(keyboard: str, seeds: Sequence[int], duration_s: float,
                      config: PipelineConfig, window_s: float):
    mfcc = config.keyboard.mfcc(config.mfcc)
    windows = []
    for seed in seeds:
        session = synth_keyboard_session(SynthConfig(keyboard_class=keyboard, seed=seed), duration_s,
                                         participant=f"{keyboard}-{seed}")
        windows.extend(keyboard_type_features(session.audio, window_s, mfcc))
    return windows


def kbtype_study(config: PipelineConfig, settings: StudySettings) -> Tuple[pd.DataFrame, PlotSpec]:
    """Train on some synthetic sessions per keyboard class, classify the windows of unseen ones."""
    window_s = settings.kb_window_s or config.keyboard.window_s
    duration = window_s * settings.kb_windows_per_session + 1.0
    train_x, train_y, test_x, test_y = [], [], [], []
    for k, keyboard in enumerate(KEYBOARD_CLASSES):
        base = config.seed + 100 * (k + 1)
        train_seeds = [base + i for i in range(settings.kb_train_sessions)]
        test_seeds = [base + 50 + i for i in range(settings.kb_test_sessions)]
        windows = _keyboard_windows(keyboard, train_seeds, duration, config, window_s)
        train_x.extend(windows)
        train_y.extend([keyboard] * len(windows))
        windows = _keyboard_windows(keyboard, test_seeds, duration, config, window_s)
        test_x.extend(windows)
        test_y.extend([keyboard] * len(windows))

    kb = config.keyboard
    model = train_keyboard_type_model(train_x, train_y, kb.learning_rate, kb.l2, kb.max_iter, kb.tol)
    predicted = predict_keyboard_windows(model, test_x)
    table = per_class_precision_recall(predicted, test_y, KEYBOARD_CLASSES)
    table["accuracy"] = float(np.mean(np.asarray(predicted) == np.asarray(test_y)))
    logger.info("keyboard type accuracy %.3f on %d held-out windows", table["accuracy"].iloc[0], len(test_y))
    return table, PlotSpec(x="label", metric="recall", title="Keyboard-type recall on held-out sessions")


def models_study(config: PipelineConfig, settings: StudySettings) -> Tuple[pd.DataFrame, PlotSpec]:
    """
    Both classifiers run with lambda = 0. A single tree's Laplace-smoothed
    maximum never reaches 0.5 with more than two keys per group, so at the
    default lambda it would always fall back to another group.
    """
    rows = []
    base = _routed_only(config)
    for keyboard in tqdm(KEYBOARD_CLASSES, desc="Keyboards"):
        sessions = _key_sessions(SynthConfig(keyboard_class=keyboard, seed=config.seed), settings)
        for classifier in ("forest", "tree"):
            variant = replace(base, models=replace(base.models, classifier=classifier))
            scores = _loocv_scores(sessions, variant)
            rows.append({"keyboard": keyboard, "classifier": classifier,
                         "top1": scores["top1"], "top5": scores["top5"]})
    return pd.DataFrame(rows), PlotSpec(x="keyboard", hue="classifier", metric="top5",
                                        title="Top-5 key accuracy: random forest vs decision tree")


def words_study(config: PipelineConfig, settings: StudySettings) -> Tuple[pd.DataFrame, PlotSpec]:
    """True letters pushed to rank 2..5 at up to two positions per word; both SymSpell orderings vs exact match."""
    words_cfg = config.words
    dictionary = load_dictionary(words_cfg.dictionary or BUILTIN_DICTIONARY)
    index = build_index(dictionary, words_cfg.max_edit)
    rng = np.random.default_rng(config.seed)
    vocabulary = list(dictionary)
    n_words = min(settings.n_words, len(vocabulary))
    picked = [vocabulary[i] for i in rng.choice(len(vocabulary), size=n_words, replace=False)]

    by_frequency, by_distance, naive = [], [], []
    for word in tqdm(picked, desc="Words"):
        topk = corrupt_topk(word, rng)
        by_frequency.append(predict_words(topk, index, words_cfg.top_w, words_cfg.beam_width))
        by_distance.append(predict_words(topk, index, words_cfg.top_w, words_cfg.beam_width,
                                         distance_first=True))
        naive.append(naive_dictionary_match(topk, dictionary, words_cfg.beam_width))

    rows = []
    methods = (("symspell", by_frequency), ("symspell_distance_first", by_distance), ("naive", naive))
    for method, predictions in methods:
        row = {"method": method, "n_words": n_words}
        row.update({f"top{k}": top_k_word_accuracy(predictions, picked, k) for k in WORD_KS})
        rows.append(row)
    return pd.DataFrame(rows), PlotSpec(x="method", metric=f"top{WORD_KS[-1]}",
                                        title="Top-100 word accuracy under corrupted letter rankings")


STUDIES: Dict[str, Callable[[PipelineConfig, StudySettings], Tuple[pd.DataFrame, PlotSpec]]] = {
    "sampling_rate": sampling_rate_study,
    "ablation": ablation_study,
    "noise": noise_study,
    "kbtype": kbtype_study,
    "models": models_study,
    "words": words_study,
}


def run_study(name: str, config: PipelineConfig, output_dir: str, quick: bool = False) -> StudyReport:
    """
    Run one study and write its CSV, plot and Markdown summary.

    Raises:
        ConfigError: unknown study name
    """
    try:
        study = STUDIES[name]
    except KeyError:
        raise ConfigError(f"unknown study {name!r}; expected one of {sorted(STUDIES)}") from None

    settings = QUICK if quick else FULL
    config = _study_config(config, settings)
    logger.info("🚀 Study %s (%s mode, seed %d)", name, "quick" if quick else "full", config.seed)
    table, plot = study(config, settings)

    csv_path = write_csv_report(table, os.path.join(output_dir, f"{name}.csv"))
    plot_path = plot_study(table, plot, os.path.join(output_dir, f"{name}.png"))
    markdown_path = generate_markdown_report(
        name, table, config.to_dict(), os.path.join(output_dir, f"{name}.md"),
        description=(study.__doc__ or "").strip(),
        extra={"Participants": settings.participants, "Repetitions per key": settings.reps,
               "Quick mode": quick},
    )
    logger.info("✅ Study %s finished", name)
    return StudyReport(name, table, csv_path, plot_path, markdown_path)
