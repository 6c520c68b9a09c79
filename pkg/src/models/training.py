"""
Training Harness
Keystroke datasets, stratified grid search, per-group model training and
leave-one-participant-out evaluation.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from sklearn.model_selection import ParameterGrid, StratifiedKFold
from tqdm import tqdm

from src.core.localization import GROUP_KEYS, GROUP_ORDER, ClusterThresholds, median_energy_ratio
from src.errors import ConfigError, EmptyInputError, ShapeError, StratificationError
from src.models.classifiers import train_decision_tree, train_random_forest
from src.models.grouping import GroupModelSet, predict_flat_batch, predict_key_batch
from src.models.metrics import summarize_topk

logger = logging.getLogger(__name__)

DEFAULT_PARAM_GRID = {"n_trees": [100, 300], "max_depth": [None, 20], "min_leaf": [1, 3]}
DEFAULT_KS = (1, 3, 5, 10)
CLASSIFIERS = {"forest": train_random_forest, "tree": train_decision_tree}


@dataclass
class KeystrokeDataset:
    """One row per labeled keystroke."""
    features: np.ndarray
    keys: np.ndarray
    e_r: np.ndarray
    participant: np.ndarray

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        self.keys = np.asarray(self.keys, dtype=str)
        self.e_r = np.asarray(self.e_r, dtype=np.float64)
        self.participant = np.asarray(self.participant, dtype=str)
        n = self.features.shape[0]
        if not (self.keys.size == self.e_r.size == self.participant.size == n):
            raise ShapeError("dataset columns differ in length")

    def __len__(self) -> int:
        return int(self.features.shape[0])

    def subset(self, mask) -> "KeystrokeDataset":
        return KeystrokeDataset(self.features[mask], self.keys[mask], self.e_r[mask], self.participant[mask])

    def participants(self) -> List[str]:
        return sorted(set(self.participant.tolist()))

    @classmethod
    def concat(cls, parts: Sequence["KeystrokeDataset"]) -> "KeystrokeDataset":
        parts = [p for p in parts if len(p)]
        if not parts:
            raise EmptyInputError("no labeled keystrokes")
        return cls(
            np.vstack([p.features for p in parts]),
            np.concatenate([p.keys for p in parts]),
            np.concatenate([p.e_r for p in parts]),
            np.concatenate([p.participant for p in parts]),
        )


# ============================================================================
# GRID SEARCH
# ============================================================================

@dataclass
class GridSearchResult:
    best_params: Dict
    best_score: float
    table: pd.DataFrame
    fold_predictions: pd.DataFrame


def grid_search(trainer: Callable, param_grid, features, labels, n_folds: int = 3,
                seed: int = 0) -> GridSearchResult:
    """
    Exhaustive stratified k-fold search scored by mean top-1 accuracy.

    Ties keep the earliest point in ``ParameterGrid`` order. Every fold
    prediction is returned so scores can be recomputed.

    Raises:
        ConfigError: n_folds < 2 or empty grid
        StratificationError: some class has fewer samples than folds
    """
    if n_folds < 2:
        raise ConfigError(f"n_folds must be >= 2, got {n_folds}")
    grid = list(ParameterGrid(param_grid))
    if not grid:
        raise ConfigError("parameter grid is empty")
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    classes, counts = np.unique(y, return_counts=True)
    short = classes[counts < n_folds]
    if short.size:
        raise StratificationError(f"classes {short.tolist()} have fewer than {n_folds} samples; "
                                  f"some fold would miss them")
    folds = list(StratifiedKFold(n_splits=n_folds, shuffle=True, random_state=seed).split(X, y))

    rows, predictions = [], []
    best_index, best_score = 0, -np.inf
    for index, params in enumerate(grid):
        scores = []
        for fold, (train_rows, test_rows) in enumerate(folds):
            model = trainer(X[train_rows], y[train_rows], **params)
            predicted = model.predict(X[test_rows])
            scores.append(float(np.mean(predicted == y[test_rows])))
            predictions.append(pd.DataFrame({
                "params_index": index,
                "fold": fold,
                "sample": test_rows,
                "truth": y[test_rows],
                "predicted": predicted,
            }))
        mean_score = float(np.mean(scores))
        rows.append({"params_index": index, "params": dict(params), "mean_score": mean_score,
                     **{f"fold{f}": s for f, s in enumerate(scores)}})
        if mean_score > best_score:
            best_index, best_score = index, mean_score
    return GridSearchResult(dict(grid[best_index]), best_score, pd.DataFrame(rows),
                            pd.concat(predictions, ignore_index=True))


# ============================================================================
# GROUP MODELS
# ============================================================================

def _classifier(name: str) -> Callable:
    try:
        return CLASSIFIERS[name]
    except KeyError:
        raise ConfigError(f"unknown classifier {name!r}; expected one of {sorted(CLASSIFIERS)}") from None


def _fit_model(features, labels, params: Mapping, seed: int, grid: Optional[Mapping], n_folds: int,
                classifier: str = "forest"):
    fit = _classifier(classifier)
    params = dict(params)
    if grid:
        def trainer(X, y, **point):
            return fit(X, y, **{**params, **point, "seed": seed})
        result = grid_search(trainer, grid, features, labels, n_folds=n_folds, seed=seed)
        logger.info("grid search picked %s (cv top-1 %.3f)", result.best_params, result.best_score)
        params.update(result.best_params)
    params["seed"] = seed
    return fit(features, labels, **params)


def train_group_models(dataset: KeystrokeDataset, params: Optional[Mapping] = None,
                       thresholds: ClusterThresholds = ClusterThresholds(), seed: int = 0,
                       grid: Optional[Mapping] = None, n_folds: int = 3,
                       classifier: str = "forest") -> GroupModelSet:
    """One classifier per hand group (random forest by default), trained on the keys of that group only."""
    params = params or {}
    models = {}
    for offset, group in enumerate(GROUP_ORDER):
        mask = np.isin(dataset.keys, list(GROUP_KEYS[group]))
        if not np.any(mask):
            raise EmptyInputError(f"no training keystrokes for {group.value}")
        models[group] = _fit_model(dataset.features[mask], dataset.keys[mask], params,
                                    seed + offset, grid, n_folds, classifier)
    return GroupModelSet(models, thresholds)


def train_flat_model(dataset: KeystrokeDataset, params: Optional[Mapping] = None, seed: int = 0,
                     grid: Optional[Mapping] = None, n_folds: int = 3, classifier: str = "forest"):
    """Unclustered model over every key (ablation baseline)."""
    return _fit_model(dataset.features, dataset.keys, params or {}, seed, grid, n_folds, classifier)


# ============================================================================
# LEAVE-ONE-PARTICIPANT-OUT
# ============================================================================

@dataclass
class LoocvReport:
    rows: pd.DataFrame
    predictions: Dict[str, list] = field(default_factory=dict)
    truth: Dict[str, list] = field(default_factory=dict)

    def aggregate(self) -> Dict[str, float]:
        numeric = self.rows.drop(columns=["participant"]).select_dtypes("number")
        return {column: float(numeric[column].mean()) for column in numeric.columns}

    def to_dict(self) -> Dict:
        return {"participants": self.rows.to_dict(orient="records"), "aggregate": self.aggregate()}


def loocv(dataset: KeystrokeDataset, trainer: Callable[[KeystrokeDataset], GroupModelSet],
          thresholds: ClusterThresholds = ClusterThresholds(), ks: Sequence[int] = DEFAULT_KS,
          flat_trainer: Optional[Callable] = None, progress: bool = False) -> LoocvReport:
    """
    Hold each participant out in turn: train on everyone else, take the median
    energy ratio from the held-out participant's own keystrokes, score top-k.

    ``flat_trainer`` adds the unclustered baseline columns (``flat_top*``).

    Raises:
        ConfigError: fewer than 2 participants
    """
    participants = dataset.participants()
    if len(participants) < 2:
        raise ConfigError(f"leave-one-out needs at least 2 participants, got {len(participants)}")

    rows, predictions, truth = [], {}, {}
    for victim in tqdm(participants, desc="LOOCV", disable=not progress):
        train = dataset.subset(dataset.participant != victim)
        test = dataset.subset(dataset.participant == victim)
        models = trainer(train)
        e_med = median_energy_ratio(test.e_r)
        routed = GroupModelSet(models.models, thresholds.with_median(e_med))
        preds = predict_key_batch(test.features, test.e_r, routed)
        truth_keys = test.keys.tolist()
        row = {"participant": victim, "n": len(test), "e_med": e_med,
               **summarize_topk(preds, truth_keys, ks),
               "fallback_rate": float(np.mean([p.fallback_used for p in preds]))}
        if flat_trainer is not None:
            flat_preds = predict_flat_batch(test.features, flat_trainer(train))
            row.update({f"flat_{k}": v for k, v in summarize_topk(flat_preds, truth_keys, ks).items()})
        logger.info("participant %s: top-1 %.3f, top-5 %.3f", victim, row.get("top1", np.nan),
                    row.get("top5", np.nan))
        rows.append(row)
        predictions[victim] = preds
        truth[victim] = truth_keys
    return LoocvReport(pd.DataFrame(rows), predictions, truth)
