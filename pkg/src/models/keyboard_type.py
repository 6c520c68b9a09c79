"""
Keyboard Type Inference
Multinomial logistic regression over 30-second window descriptors
(6 MFCC window means + RMSE) distinguishing keyboard classes K1/K2/K3.
"""

from collections import Counter
from typing import Dict, List, Sequence

import numpy as np

from src.core.features import KeyboardTypeFeatures
from src.errors import DegenerateLabelsError, EmptyInputError, ShapeError
from src.models.classifiers import SoftmaxRegression

KEYBOARD_CLASSES = ("K1", "K2", "K3")


def _matrix(features: Sequence) -> np.ndarray:
    rows = [getattr(f, "values", f) for f in features]
    if not rows:
        raise EmptyInputError("no keyboard-type feature windows")
    return np.vstack([np.asarray(r, dtype=np.float64) for r in rows])


def train_keyboard_type_model(features: Sequence[KeyboardTypeFeatures], labels: Sequence[str],
                              learning_rate: float = 0.1, l2: float = 1e-3,
                              max_iter: int = 5000, tol: float = 1e-6) -> SoftmaxRegression:
    """
    Fit the keyboard-type classifier.

    Raises:
        DegenerateLabelsError: one of K1/K2/K3 has no training window
        ShapeError: features and labels differ in length
    """
    X = _matrix(features)
    labels = [str(label) for label in labels]
    if X.shape[0] != len(labels):
        raise ShapeError(f"{X.shape[0]} windows but {len(labels)} labels")
    missing = [k for k in KEYBOARD_CLASSES if k not in labels]
    if missing:
        raise DegenerateLabelsError(f"no training windows for keyboard classes {missing}")
    model = SoftmaxRegression(learning_rate=learning_rate, l2=l2, max_iter=max_iter, tol=tol)
    return model.fit(X, labels)


def predict_keyboard_windows(model: SoftmaxRegression, features: Sequence[KeyboardTypeFeatures]) -> List[str]:
    return [str(label) for label in model.predict(_matrix(features))]


def predict_keyboard_type(model: SoftmaxRegression, features: Sequence[KeyboardTypeFeatures]) -> Dict:
    """Session-level verdict: majority over windows, ties broken by mean probability."""
    X = _matrix(features)
    probs = model.predict_proba(X)
    votes = Counter(model.classes_[np.argmax(probs, axis=1)].tolist())
    mean_probs = probs.mean(axis=0)
    index = {label: i for i, label in enumerate(model.classes_.tolist())}
    best = max(votes, key=lambda label: (votes[label], mean_probs[index[label]]))
    return {
        "keyboard": str(best),
        "windows": int(X.shape[0]),
        "votes": {str(k): int(v) for k, v in votes.items()},
        "mean_probability": {str(label): float(mean_probs[i]) for label, i in index.items()},
    }
