"""
Metrics
Top-k key accuracy, segmentation precision/recall, per-class reports,
QWERTY distance of misclassifications and typing speed.
"""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix as sk_confusion_matrix
from sklearn.metrics import precision_recall_fscore_support

from src.errors import ConfigError, EmptyInputError, ShapeError

QWERTY_ROWS = (("qwertyuiop", 0.0), ("asdfghjkl", 0.25), ("zxcvbnm", 0.75))
KEY_POSITIONS: Dict[str, Tuple[float, float]] = {
    key: (offset + col, float(row))
    for row, (keys, offset) in enumerate(QWERTY_ROWS)
    for col, key in enumerate(keys)
}


def top_k_accuracy(predictions: Sequence, truth: Sequence[str], k: int) -> float:
    """
    Fraction of samples whose true key is among the first k ranked keys.

    Raises:
        ShapeError: predictions and truth differ in length
        ConfigError: k < 1
        EmptyInputError: no samples
    """
    if len(predictions) != len(truth):
        raise ShapeError(f"{len(predictions)} predictions but {len(truth)} labels")
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if len(truth) == 0:
        raise EmptyInputError("top-k accuracy of an empty set")
    hits = sum(1 for pred, key in zip(predictions, truth) if key in pred.top_keys(k))
    return hits / len(truth)


def segmentation_pr(detected: Sequence[float], truth: Sequence[float],
                    tolerance_ms: float = 10.0) -> Tuple[float, float]:
    """
    Greedy one-to-one matching of detected starts to true press times.

    Pairs are taken in order of increasing time difference; a pair counts when
    both sides are still unmatched and the difference is within tolerance.
    An empty side scores 1.0 when the other side is empty too, else 0.0.
    """
    if tolerance_ms <= 0:
        raise ConfigError("tolerance_ms must be positive")
    detected = np.asarray(detected, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    matched = len(match_starts(detected, truth, tolerance_ms))

    def ratio(count: int) -> float:
        if count == 0:
            return 1.0 if detected.size == truth.size == 0 else 0.0
        return matched / count

    return ratio(detected.size), ratio(truth.size)


def match_starts(detected: Sequence[float], truth: Sequence[float],
                 tolerance_ms: float = 10.0) -> Dict[int, int]:
    """Same greedy matching, returned as {detected index: truth index}."""
    detected = np.asarray(detected, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    pairs: Dict[int, int] = {}
    if detected.size == 0 or truth.size == 0:
        return pairs
    diff = np.abs(detected[:, np.newaxis] - truth[np.newaxis, :])
    rows, cols = np.nonzero(diff <= tolerance_ms / 1000.0 + 1e-12)
    used_t = set()
    for idx in np.lexsort((cols, rows, diff[rows, cols])):
        d, t = int(rows[idx]), int(cols[idx])
        if d in pairs or t in used_t:
            continue
        pairs[d] = t
        used_t.add(t)
    return pairs


# ============================================================================
# CLASS-LEVEL REPORTS
# ============================================================================

def per_class_precision_recall(predicted: Sequence[str], truth: Sequence[str],
                               labels: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Precision, recall and support per class (0 where a class is never predicted)."""
    if len(predicted) != len(truth):
        raise ShapeError(f"{len(predicted)} predictions but {len(truth)} labels")
    labels = list(labels) if labels is not None else sorted(set(truth) | set(predicted))
    precision, recall, _, support = precision_recall_fscore_support(
        list(truth), list(predicted), labels=labels, zero_division=0
    )
    return pd.DataFrame({"label": labels, "precision": precision, "recall": recall, "support": support})


def confusion_matrix(predicted: Sequence[str], truth: Sequence[str],
                     labels: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Rows are true labels, columns predicted labels."""
    labels = list(labels) if labels is not None else sorted(set(truth) | set(predicted))
    matrix = sk_confusion_matrix(list(truth), list(predicted), labels=labels)
    return pd.DataFrame(matrix, index=labels, columns=labels)


def key_distance(a: str, b: str) -> float:
    """Euclidean distance between two keys on a staggered QWERTY grid, in key widths."""
    try:
        (xa, ya), (xb, yb) = KEY_POSITIONS[a], KEY_POSITIONS[b]
    except KeyError as exc:
        raise ConfigError(f"unknown key {exc.args[0]!r}") from None
    return float(np.hypot(xa - xb, ya - yb))


def misclassification_distances(predicted: Sequence[str], truth: Sequence[str]) -> Dict[str, float]:
    """How far (on the keyboard) wrong top-1 predictions land from the true key."""
    if len(predicted) != len(truth):
        raise ShapeError(f"{len(predicted)} predictions but {len(truth)} labels")
    distances = [key_distance(p, t) for p, t in zip(predicted, truth) if p != t]
    if not distances:
        return {"errors": 0, "mean_distance": 0.0, "adjacent_fraction": 0.0}
    distances = np.asarray(distances)
    return {
        "errors": int(distances.size),
        "mean_distance": float(distances.mean()),
        "adjacent_fraction": float(np.mean(distances <= 1.25)),
    }


def typing_speed_wpm(press_times: Sequence[float], chars_per_word: int = 5) -> float:
    """Words per minute between the first and the last key press."""
    times = sorted(press_times)
    if len(times) < 2 or times[-1] <= times[0]:
        return 0.0
    minutes = (times[-1] - times[0]) / 60.0
    return (len(times) - 1) / chars_per_word / minutes


def summarize_topk(predictions: Sequence, truth: Sequence[str], ks: Sequence[int] = (1, 3, 5, 10)) -> Dict[str, float]:
    return {f"top{k}": top_k_accuracy(predictions, truth, k) for k in ks}


def top1_keys(predictions: Sequence) -> List[str]:
    return [pred.top_key for pred in predictions]
