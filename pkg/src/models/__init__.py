"""Classifiers, hand-group routing, training harnesses and metrics."""

from .classifiers import (
    Classifier,
    RandomForestModel,
    SoftmaxRegression,
    train_decision_tree,
    train_random_forest,
)
from .grouping import (
    GroupModelSet,
    RankedPrediction,
    predict_flat_batch,
    predict_key,
    predict_key_batch,
)
from .keyboard_type import predict_keyboard_type, train_keyboard_type_model
from .metrics import segmentation_pr, top_k_accuracy
from .training import (
    KeystrokeDataset,
    grid_search,
    loocv,
    train_flat_model,
    train_group_models,
)

__all__ = [
    # Classifiers
    'Classifier',
    'RandomForestModel',
    'SoftmaxRegression',
    'train_decision_tree',
    'train_random_forest',

    # Routing
    'GroupModelSet',
    'RankedPrediction',
    'predict_flat_batch',
    'predict_key',
    'predict_key_batch',

    # Keyboard type
    'predict_keyboard_type',
    'train_keyboard_type_model',

    # Metrics
    'segmentation_pr',
    'top_k_accuracy',

    # Training
    'KeystrokeDataset',
    'grid_search',
    'loocv',
    'train_flat_model',
    'train_group_models',
]
