"""
Keystroke Pipeline
Session -> filtered streams -> detected keystrokes -> per-keystroke features,
energy ratios and TDoA; labelled sessions additionally yield training rows.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from src.automation.config import PipelineConfig
from src.core.features import feature_length, keystroke_features, stack_features
from src.core.localization import energy_ratio, tdoa
from src.core.preprocess import FilterSpec, bandpass_audio, lowpass_accel
from src.core.segmentation import detect_keystrokes, extract_segments
from src.core.signal_io import SensorSession
from src.errors import ConfigError, DegenerateSignalError, EmptyInputError
from src.models.grouping import GroupModelSet
from src.models.metrics import match_starts, segmentation_pr
from src.models.training import (
    DEFAULT_KS,
    KeystrokeDataset,
    LoocvReport,
    loocv,
    train_flat_model,
    train_group_models,
)

logger = logging.getLogger(__name__)

ANCHORS = ("detected", "labels")


@dataclass
class ProcessedSession:
    """
    Per-keystroke arrays of one session.

    ``keys`` holds the true key of every kept keystroke when the session is
    labelled (detections without a label within tolerance are dropped), else None.
    """
    starts: np.ndarray
    features: np.ndarray
    e_r: np.ndarray
    tdoa: np.ndarray  # samples, NaN where a channel was silent
    keys: Optional[np.ndarray]
    participant: str
    keyboard: str
    precision: Optional[float] = None
    recall: Optional[float] = None

    def __len__(self) -> int:
        return int(self.starts.size)

    def to_dataset(self) -> KeystrokeDataset:
        if self.keys is None:
            raise EmptyInputError(f"session of {self.participant} has no labels")
        return KeystrokeDataset(self.features, self.keys, self.e_r, np.full(len(self), self.participant))


def preprocess_session(session: SensorSession, config: PipelineConfig,
                       audio_spec: Optional[FilterSpec] = None) -> SensorSession:
    """Bandpass the audio and lowpass the accelerometers."""
    audio = bandpass_audio(session.audio, audio_spec or config.filters.audio_spec())
    accel = lowpass_accel(session.accel, config.filters.accel_spec())
    return session.with_streams(audio, accel)


def process_session(session: SensorSession, config: PipelineConfig, anchor: str = "detected",
                    audio_spec: Optional[FilterSpec] = None) -> ProcessedSession:
    """
    Run filtering, segmentation, feature extraction and clustering inputs.

    ``anchor="labels"`` cuts segments at the labelled press times instead of
    the detected starts.
    """
    if anchor not in ANCHORS:
        raise ConfigError(f"anchor must be one of {ANCHORS}, got {anchor!r}")
    seg_cfg = config.segmentation
    filtered = preprocess_session(session, config, audio_spec)

    truth_times = np.asarray(session.label_times(), dtype=np.float64)
    truth_keys = np.asarray(session.label_keys(), dtype=str)
    labelled = session.labels is not None
    precision = recall = None

    if anchor == "labels" and labelled:
        starts, keys = truth_times, truth_keys
    else:
        starts = np.asarray(detect_keystrokes(filtered, seg_cfg.peak_params(), seg_cfg.window_ms))
        keys = None
        if labelled:
            precision, recall = segmentation_pr(starts, truth_times, seg_cfg.match_tolerance_ms)
            pairs = match_starts(starts, truth_times, seg_cfg.match_tolerance_ms)
            kept = np.array(sorted(pairs), dtype=int)
            starts = starts[kept] if kept.size else np.zeros(0)
            keys = truth_keys[[pairs[i] for i in kept]] if kept.size else np.zeros(0, dtype=str)
            logger.debug("%s: precision %.3f recall %.3f", session.meta.participant, precision, recall)

    segments = extract_segments(filtered, starts.tolist(), seg_cfg.pre_ms, seg_cfg.post_ms)
    mfcc = config.mfcc.build()
    thresholds = config.clustering.thresholds()
    max_lag = int(round(config.clustering.tdoa_max_lag_ms * filtered.audio.sample_rate / 1000.0))

    rows = [keystroke_features(s, mfcc) for s in segments]
    features = stack_features(rows) if rows else np.zeros((0, feature_length(mfcc.n_coeffs)))
    lags = []
    for segment in segments:
        try:
            lags.append(float(tdoa(segment, min(max_lag, segment.audio.n_samples - 1))))
        except DegenerateSignalError:
            lags.append(np.nan)

    return ProcessedSession(
        starts=np.asarray(starts, dtype=np.float64),
        features=features,
        e_r=np.array([energy_ratio(s, thresholds) for s in segments], dtype=np.float64),
        tdoa=np.asarray(lags, dtype=np.float64),
        keys=keys,
        participant=session.meta.participant,
        keyboard=session.meta.keyboard,
        precision=precision,
        recall=recall,
    )


def build_dataset(sessions: Sequence[SensorSession], config: PipelineConfig, anchor: str = "detected",
                  audio_spec: Optional[FilterSpec] = None, progress: bool = False) -> KeystrokeDataset:
    """Labelled sessions -> one KeystrokeDataset (participant column from session metadata)."""
    parts = [
        process_session(session, config, anchor, audio_spec).to_dataset()
        for session in tqdm(sessions, desc="Sessions", disable=not progress)
    ]
    return KeystrokeDataset.concat(parts)


def group_words(starts: Sequence[float], pause_ms: float) -> List[List[int]]:
    """Indices of consecutive keystrokes split wherever the gap reaches ``pause_ms``."""
    words: List[List[int]] = []
    previous = None
    for i, start in enumerate(starts):
        if previous is None or (start - previous) * 1000.0 >= pause_ms:
            words.append([])
        words[-1].append(i)
        previous = start
    return words


# ============================================================================
# TRAINING
# ============================================================================

def make_trainer(config: PipelineConfig) -> Callable[[KeystrokeDataset], GroupModelSet]:
    m = config.models

    def trainer(dataset: KeystrokeDataset) -> GroupModelSet:
        return train_group_models(dataset, m.params(), config.clustering.thresholds(), config.seed,
                                  m.grid, m.n_folds, m.classifier)
    return trainer


def make_flat_trainer(config: PipelineConfig) -> Callable:
    m = config.models

    def trainer(dataset: KeystrokeDataset):
        return train_flat_model(dataset, m.params(), config.seed, m.grid, m.n_folds, m.classifier)
    return trainer


def run_loocv(dataset: KeystrokeDataset, config: PipelineConfig, with_flat: bool = False,
              ks: Sequence[int] = DEFAULT_KS, progress: bool = False) -> LoocvReport:
    return loocv(dataset, make_trainer(config), config.clustering.thresholds(), ks,
                 make_flat_trainer(config) if with_flat else None, progress)
