"""
Classifiers
Probabilistic multi-class models used by the pipeline:

- ``RandomForestModel``: an ensemble of scikit-learn decision trees, each fit
  on its own bootstrap sample. Class probabilities are the Laplace-smoothed
  shares of tree votes, (votes + 1) / (n_trees + n_classes).
- ``train_decision_tree``: the same wrapper with a single tree and no
  bootstrap, used as the model-comparison baseline.
- ``SoftmaxRegression``: multinomial logistic regression trained by batch
  gradient ascent with an L2 penalty (keyboard-type inference).
"""

from typing import Any, Optional, Protocol, Sequence, runtime_checkable

import numpy as np
from sklearn.tree import DecisionTreeClassifier
from sklearn.utils import check_random_state

from src.errors import ConfigError, DegenerateLabelsError, ShapeError, StateError


@runtime_checkable
class Classifier(Protocol):
    classes_: np.ndarray

    def fit(self, features: np.ndarray, labels: Sequence[Any]) -> "Classifier":
        ...

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        ...


def _as_training_data(features, labels):
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2:
        raise ShapeError(f"features must be a 2-D matrix, got shape {X.shape}")
    if X.shape[0] != y.shape[0]:
        raise ShapeError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
    classes = np.unique(y)
    if classes.size < 2:
        raise DegenerateLabelsError(f"need at least 2 classes, got {classes.tolist()}")
    return X, y, classes


class RandomForestModel:
    """
    Bagged decision trees with Laplace-smoothed vote shares.

    Attributes:
        classes_: sorted label set fixed by ``fit``
        estimators_: fitted ``DecisionTreeClassifier`` objects
    """

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: Optional[int] = None,
        min_leaf: int = 1,
        max_features: Optional[str] = "sqrt",
        bootstrap: bool = True,
        seed: int = 0,
    ):
        if n_trees < 1:
            raise ConfigError("n_trees must be >= 1")
        if min_leaf < 1:
            raise ConfigError("min_leaf must be >= 1")
        if max_depth is not None and max_depth < 1:
            raise ConfigError("max_depth must be >= 1 or None")
        self.n_trees = int(n_trees)
        self.max_depth = max_depth
        self.min_leaf = int(min_leaf)
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed
        self.estimators_ = []

    def get_params(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
        }

    def fit(self, features, labels) -> "RandomForestModel":
        X, y, classes = _as_training_data(features, labels)
        prng = check_random_state(self.seed)
        n = X.shape[0]
        estimators = []
        for _ in range(self.n_trees):
            rows = prng.randint(0, n, n) if self.bootstrap else np.arange(n)
            tree = DecisionTreeClassifier(
                max_depth=self.max_depth,
                min_samples_leaf=self.min_leaf,
                max_features=self.max_features,
                random_state=prng.randint(np.iinfo(np.int32).max),
            )
            tree.fit(X[rows], y[rows])
            estimators.append(tree)
        self.classes_ = classes
        self.estimators_ = estimators
        return self

    def _check_fitted(self):
        if not self.estimators_:
            raise StateError("model is not trained")

    def predict_proba(self, features) -> np.ndarray:
        """(votes + 1) / (n_trees + n_classes); a tree splits its vote by its leaf class fractions."""
        self._check_fitted()
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        votes = np.zeros((X.shape[0], self.classes_.size))
        for tree in self.estimators_:
            votes[:, np.searchsorted(self.classes_, tree.classes_)] += tree.predict_proba(X)
        return (votes + 1.0) / (len(self.estimators_) + self.classes_.size)

    def predict(self, features) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(features), axis=1)]


def train_random_forest(features, labels, n_trees: int = 100, max_depth: Optional[int] = None,
                        min_leaf: int = 1, seed: int = 0, bootstrap: bool = True,
                        max_features: Optional[str] = "sqrt") -> RandomForestModel:
    """
    Fit a random forest; identical seed and data give identical predictions.

    Raises:
        DegenerateLabelsError: fewer than 2 classes
    """
    model = RandomForestModel(n_trees=n_trees, max_depth=max_depth, min_leaf=min_leaf,
                              max_features=max_features, bootstrap=bootstrap, seed=seed)
    return model.fit(features, labels)


def train_decision_tree(features, labels, max_depth: Optional[int] = None, min_leaf: int = 1,
                        seed: int = 0, **_ignored) -> RandomForestModel:
    """Single tree over all features on the full training set."""
    model = RandomForestModel(n_trees=1, max_depth=max_depth, min_leaf=min_leaf,
                              max_features=None, bootstrap=False, seed=seed)
    return model.fit(features, labels)


class SoftmaxRegression:
    """
    Multinomial logistic regression on standardized features.

    Fit by batch gradient ascent on the mean log-likelihood minus
    ``l2 / 2 * ||W||^2`` (bias excluded), starting from zeros, so the result
    is deterministic.
    """

    def __init__(self, learning_rate: float = 0.1, l2: float = 1e-3,
                 max_iter: int = 5000, tol: float = 1e-6):
        if learning_rate <= 0 or max_iter < 1 or l2 < 0 or tol <= 0:
            raise ConfigError("invalid logistic regression settings")
        self.learning_rate = learning_rate
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.weights_ = None
        self.n_iter_ = 0

    @staticmethod
    def _softmax(scores: np.ndarray) -> np.ndarray:
        shifted = scores - scores.max(axis=1, keepdims=True)
        expo = np.exp(shifted)
        return expo / expo.sum(axis=1, keepdims=True)

    def _design(self, X: np.ndarray) -> np.ndarray:
        standardized = (X - self.mean_) / self.scale_
        return np.hstack([standardized, np.ones((X.shape[0], 1))])

    def fit(self, features, labels) -> "SoftmaxRegression":
        X, y, classes = _as_training_data(features, labels)
        self.classes_ = classes
        self.mean_ = X.mean(axis=0)
        scale = X.std(axis=0)
        self.scale_ = np.where(scale < 1e-12, 1.0, scale)

        design = self._design(X)
        targets = (y[:, np.newaxis] == classes[np.newaxis, :]).astype(np.float64)
        weights = np.zeros((design.shape[1], classes.size))
        penalty = np.ones((design.shape[1], 1))
        penalty[-1] = 0.0
        n = X.shape[0]

        for iteration in range(1, self.max_iter + 1):
            probs = self._softmax(design @ weights)
            gradient = design.T @ (targets - probs) / n - self.l2 * penalty * weights
            if np.linalg.norm(gradient) < self.tol:
                break
            weights += self.learning_rate * gradient
        self.n_iter_ = iteration
        self.weights_ = weights
        return self

    def predict_proba(self, features) -> np.ndarray:
        if self.weights_ is None:
            raise StateError("model is not trained")
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        return self._softmax(self._design(X) @ self.weights_)

    def predict(self, features) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(features), axis=1)]
