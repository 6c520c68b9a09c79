"""
Group Models
Energy-ratio routing between the three hand-group classifiers, with the
low-confidence fallback to the most confident group model, plus the flat
26-class baseline used by the clustering ablation.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.localization import (
    ALPHABET,
    GROUP_KEYS,
    GROUP_ORDER,
    ClusterThresholds,
    HandGroup,
    assign_group,
)
from src.errors import ConfigError, ShapeError, StateError

# non-chosen groups are scaled to at most this fraction of the chosen block's minimum
CROSS_GROUP_SCALE = 0.5


@dataclass(frozen=True)
class RankedPrediction:
    """Keys sorted by descending probability; ``chosen_group`` is None for the flat baseline."""
    ranked: Tuple[Tuple[str, float], ...]
    chosen_group: Optional[HandGroup]
    fallback_used: bool

    @property
    def top_key(self) -> str:
        return self.ranked[0][0]

    def top_keys(self, k: int) -> List[str]:
        return [key for key, _ in self.ranked[:k]]

    def to_dict(self, limit: Optional[int] = None) -> dict:
        rows = self.ranked if limit is None else self.ranked[:limit]
        return {
            "ranked": [[key, float(p)] for key, p in rows],
            "chosen_group": self.chosen_group.value if self.chosen_group else None,
            "fallback_used": self.fallback_used,
        }


@dataclass
class GroupModelSet:
    models: Dict[HandGroup, object]
    thresholds: ClusterThresholds = ClusterThresholds()

    def __post_init__(self):
        missing = [g.value for g in GROUP_ORDER if g not in self.models]
        if missing:
            raise ConfigError(f"missing group models: {missing}")
        if all(hasattr(self.models[g], "classes_") for g in GROUP_ORDER):
            self.check_label_sets()

    def check_label_sets(self) -> None:
        """The three label sets must be the fixed hand groups, hence disjoint and covering a-z."""
        seen = []
        for group in GROUP_ORDER:
            labels = sorted(str(c) for c in self.models[group].classes_)
            if labels != sorted(GROUP_KEYS[group]):
                raise ConfigError(f"{group.value} model labels {labels} != {sorted(GROUP_KEYS[group])}")
            seen.extend(labels)
        if sorted(seen) != list(ALPHABET):
            raise ConfigError("group label sets do not partition a-z")

    def model(self, group: HandGroup):
        model = self.models[group]
        if not hasattr(model, "classes_"):
            raise StateError(f"{group.value} model is not trained")
        return model

    def with_median(self, e_med: float) -> "GroupModelSet":
        return GroupModelSet(dict(self.models), self.thresholds.with_median(e_med))


def _ranked_block(labels: np.ndarray, probs: np.ndarray, scale: float = 1.0) -> List[Tuple[str, float]]:
    order = sorted(range(len(labels)), key=lambda i: (-probs[i], str(labels[i])))
    return [(str(labels[i]), float(probs[i] * scale)) for i in order]


def _decide(routed: HandGroup, group_probs: Dict[HandGroup, np.ndarray], lam: float) -> Tuple[HandGroup, bool]:
    if group_probs[routed].max() >= lam:
        return routed, False
    chosen = routed
    best = group_probs[routed].max()
    for group in GROUP_ORDER:
        if group != routed and group_probs[group].max() > best:
            chosen, best = group, group_probs[group].max()
    return chosen, True


def _rank_all(chosen: HandGroup, group_probs: Dict[HandGroup, np.ndarray],
              labels: Dict[HandGroup, np.ndarray]) -> Tuple[Tuple[str, float], ...]:
    head = _ranked_block(labels[chosen], group_probs[chosen])
    others = [g for g in GROUP_ORDER if g != chosen]
    max_other = max(float(group_probs[g].max()) for g in others)
    min_chosen = head[-1][1]
    scale = min_chosen * CROSS_GROUP_SCALE / max_other if max_other > 0 else 0.0
    keys = np.concatenate([labels[g] for g in others])
    probs = np.concatenate([group_probs[g] for g in others])
    return tuple(head + _ranked_block(keys, probs, scale))


def predict_key_batch(features: np.ndarray, e_rs: Sequence[float], models: GroupModelSet) -> List[RankedPrediction]:
    """
    Route each keystroke by its energy ratio, fall back to the most confident
    group model when the routed model's top probability is below lambda.

    The chosen group's keys come first; the other groups' keys follow, ordered
    by their own model probabilities and scaled to rank strictly below.

    Raises:
        StateError: a model is untrained or the median ratio is unset
        ShapeError: feature rows and ratios differ in number
    """
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    e_rs = np.asarray(e_rs, dtype=np.float64).reshape(-1)
    if X.shape[0] != e_rs.size:
        raise ShapeError(f"{X.shape[0]} feature rows but {e_rs.size} energy ratios")
    thresholds = models.thresholds
    if thresholds.e_med is None:
        raise StateError("median energy ratio not set")
    if X.shape[0] == 0:
        return []

    labels = {g: models.model(g).classes_ for g in GROUP_ORDER}
    probs = {g: models.model(g).predict_proba(X) for g in GROUP_ORDER}
    predictions = []
    for row, e_r in enumerate(e_rs):
        routed = assign_group(float(e_r), thresholds)
        row_probs = {g: probs[g][row] for g in GROUP_ORDER}
        chosen, fallback = _decide(routed, row_probs, thresholds.lam)
        predictions.append(RankedPrediction(_rank_all(chosen, row_probs, labels), chosen, fallback))
    return predictions


def predict_key(features, e_r: float, models: GroupModelSet) -> RankedPrediction:
    """Single-keystroke form of :func:`predict_key_batch`."""
    values = getattr(features, "values", features)
    return predict_key_batch(np.asarray(values)[np.newaxis, :], [e_r], models)[0]


def predict_flat_batch(features: np.ndarray, model) -> List[RankedPrediction]:
    """Rank all keys with one unclustered model (ablation baseline)."""
    if not hasattr(model, "classes_"):
        raise StateError("flat model is not trained")
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if X.shape[0] == 0:
        return []
    probs = model.predict_proba(X)
    return [RankedPrediction(tuple(_ranked_block(model.classes_, row)), None, False) for row in probs]
