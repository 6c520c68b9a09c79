import numpy as np
import pytest

from src.core.localization import ALPHABET, GROUP_KEYS, GROUP_ORDER, ClusterThresholds, HandGroup
from src.errors import ConfigError, ShapeError, StateError
from src.models.grouping import CROSS_GROUP_SCALE, GroupModelSet, predict_flat_batch, predict_key, predict_key_batch


class FixedModel:
    """Returns the same distribution for every row."""

    def __init__(self, keys, probs):
        self.classes_ = np.array(sorted(keys))
        self.probs = np.asarray(probs, dtype=np.float64)

    def predict_proba(self, features):
        return np.tile(self.probs, (np.atleast_2d(features).shape[0], 1))


def _peaked(keys, top):
    """``top`` on the first sorted key, the rest shared evenly."""
    n = len(keys)
    return [top] + [(1.0 - top) / (n - 1)] * (n - 1)


def _models(tops, lam=0.5, e_med=0.5, gamma=0.05):
    models = {g: FixedModel(GROUP_KEYS[g], _peaked(GROUP_KEYS[g], tops[g])) for g in GROUP_ORDER}
    return GroupModelSet(models, ClusterThresholds(gamma=gamma, lam=lam, e_med=e_med))


ROUTE = {HandGroup.G1: 0.8, HandGroup.G2: 0.2, HandGroup.G3: 0.5}


@pytest.mark.parametrize("routed", list(GROUP_ORDER))
def test_confident_routed_model_is_used(routed):
    tops = {g: 0.3 for g in GROUP_ORDER}
    tops[routed] = 0.6
    prediction = predict_key(np.zeros(4), ROUTE[routed], _models(tops))
    assert prediction.chosen_group is routed
    assert not prediction.fallback_used
    assert prediction.top_key == sorted(GROUP_KEYS[routed])[0]


@pytest.mark.parametrize("routed", list(GROUP_ORDER))
def test_low_confidence_falls_back_to_most_confident_group(routed):
    others = [g for g in GROUP_ORDER if g != routed]
    tops = {routed: 0.3, others[0]: 0.45, others[1]: 0.2}
    prediction = predict_key(np.zeros(4), ROUTE[routed], _models(tops))
    assert prediction.fallback_used
    assert prediction.chosen_group is others[0]
    assert prediction.top_key == sorted(GROUP_KEYS[others[0]])[0]


def test_fallback_keeps_routed_group_when_it_is_still_best():
    tops = {HandGroup.G1: 0.4, HandGroup.G2: 0.3, HandGroup.G3: 0.2}
    prediction = predict_key(np.zeros(4), 0.8, _models(tops))
    assert prediction.fallback_used
    assert prediction.chosen_group is HandGroup.G1


def test_fallback_tie_keeps_routed_group():
    tops = {HandGroup.G1: 0.3, HandGroup.G2: 0.3, HandGroup.G3: 0.3}
    prediction = predict_key(np.zeros(4), 0.2, _models(tops))
    assert prediction.chosen_group is HandGroup.G2


def test_lambda_zero_never_falls_back():
    tops = {HandGroup.G1: 0.15, HandGroup.G2: 0.9, HandGroup.G3: 0.9}
    prediction = predict_key(np.zeros(4), 0.8, _models(tops, lam=0.0))
    assert not prediction.fallback_used
    assert prediction.chosen_group is HandGroup.G1


def test_lambda_one_picks_the_global_maximum():
    tops = {HandGroup.G1: 0.5, HandGroup.G2: 0.7, HandGroup.G3: 0.6}
    for e_r in ROUTE.values():
        prediction = predict_key(np.zeros(4), e_r, _models(tops, lam=1.0))
        assert prediction.chosen_group is HandGroup.G2


def test_ranking_covers_alphabet_chosen_group_first():
    tops = {HandGroup.G1: 0.6, HandGroup.G2: 0.9, HandGroup.G3: 0.3}
    prediction = predict_key(np.zeros(4), 0.8, _models(tops))
    keys = [key for key, _ in prediction.ranked]
    probs = [p for _, p in prediction.ranked]
    assert sorted(keys) == list(ALPHABET)
    assert set(keys[:7]) == set(GROUP_KEYS[HandGroup.G1])
    assert all(a >= b for a, b in zip(probs, probs[1:]))
    assert probs[7] == pytest.approx(probs[6] * CROSS_GROUP_SCALE)


def test_batch_routes_rows_independently():
    tops = {g: 0.6 for g in GROUP_ORDER}
    predictions = predict_key_batch(np.zeros((3, 4)), [0.8, 0.2, 0.5], _models(tops))
    assert [p.chosen_group for p in predictions] == [HandGroup.G1, HandGroup.G2, HandGroup.G3]
    assert predict_key_batch(np.zeros((0, 4)), [], _models(tops)) == []


def test_batch_errors():
    tops = {g: 0.6 for g in GROUP_ORDER}
    with pytest.raises(ShapeError):
        predict_key_batch(np.zeros((2, 4)), [0.5], _models(tops))
    with pytest.raises(StateError):
        predict_key_batch(np.zeros((1, 4)), [0.5], _models(tops, e_med=None))


def test_label_sets_must_match_hand_groups():
    models = {g: FixedModel(GROUP_KEYS[g], _peaked(GROUP_KEYS[g], 0.5)) for g in GROUP_ORDER}
    models[HandGroup.G3] = FixedModel("rtyufghvbcz", _peaked("rtyufghvbcz", 0.5))
    with pytest.raises(ConfigError):
        GroupModelSet(models)
    with pytest.raises(ConfigError):
        GroupModelSet({HandGroup.G1: models[HandGroup.G1]})


def test_flat_baseline_ranks_every_class():
    model = FixedModel(ALPHABET, np.linspace(1.0, 2.0, 26) / np.linspace(1.0, 2.0, 26).sum())
    prediction = predict_flat_batch(np.zeros((1, 4)), model)[0]
    assert prediction.top_key == "z"
    assert prediction.chosen_group is None
    assert len(prediction.ranked) == 26


def test_prediction_to_dict_limits_rows():
    tops = {g: 0.6 for g in GROUP_ORDER}
    data = predict_key(np.zeros(4), 0.8, _models(tops)).to_dict(limit=10)
    assert len(data["ranked"]) == 10
    assert data["chosen_group"] == "G1"
    assert data["fallback_used"] is False


def test_zero_probability_keys_keep_the_chosen_block_first():
    models = _models({g: 0.3 for g in GROUP_ORDER})
    g1 = GROUP_KEYS[HandGroup.G1]
    models.models[HandGroup.G1] = FixedModel(g1, [1.0] + [0.0] * (len(g1) - 1))
    prediction = predict_key(np.zeros(4), 0.8, models)
    probs = [p for _, p in prediction.ranked]
    assert set(prediction.top_keys(len(g1))) == set(g1)
    assert all(a >= b for a, b in zip(probs, probs[1:]))
    assert all(p == 0.0 for p in probs[len(g1):])
