import numpy as np
import pytest

from src.errors import ConfigError, EmptyInputError
from src.wordpred.dictionary import BUILTIN_DICTIONARY, FrequencyDictionary, load_dictionary
from src.wordpred.predictor import (
    RANK_PROBABILITIES,
    corrupt_topk,
    generate_combinations,
    naive_dictionary_match,
    predict_words,
    top_k_word_accuracy,
)
from src.wordpred.symspell import build_index

FILLERS = "qzxj"


def _topk_with_buried_letters(word, buried):
    """True letter first everywhere except at ``buried`` positions, where it is last."""
    positions = []
    for i, letter in enumerate(word):
        letters = list(FILLERS)
        letters.insert(len(letters) if i in buried else 0, letter)
        positions.append(list(zip(letters, RANK_PROBABILITIES)))
    return positions


def test_beam_is_a_prefix_of_the_full_enumeration(rng):
    alphabet = np.array(list("abcdefghijklmnopqrstuvwxyz"))
    topk = []
    for _ in range(4):
        letters = rng.choice(alphabet, size=5, replace=False)
        topk.append(list(zip(letters.tolist(), rng.dirichlet(np.ones(26))[:5].tolist())))
    full = generate_combinations(topk, exhaustive=True)
    assert len(full) == 5 ** 4
    assert generate_combinations(topk, beam_width=50) == full[:50]
    probs = [p for _, p in full]
    assert all(a >= b for a, b in zip(probs, probs[1:]))


def test_combination_errors():
    with pytest.raises(EmptyInputError):
        generate_combinations([])
    with pytest.raises(EmptyInputError):
        generate_combinations([[("a", 1.0)], []])
    with pytest.raises(ConfigError):
        generate_combinations([[("a", 1.0)]], beam_width=0)


def test_symspell_recovers_word_outside_the_beam():
    dictionary = FrequencyDictionary({"because": 10, "became": 20, "bench": 5, "about": 100})
    index = build_index(dictionary, max_edit=2)
    topk = _topk_with_buried_letters("because", buried={2, 4})

    assert "because" not in [s for s, _ in generate_combinations(topk, beam_width=500)]
    assert naive_dictionary_match(topk, dictionary, beam_width=500) == []

    by_frequency = predict_words(topk, index, top_w=10)
    assert "because" in [c.word for c in by_frequency]
    assert "about" not in [c.word for c in by_frequency]
    assert [c.word for c in by_frequency][0] == "became"

    by_distance = predict_words(topk, index, top_w=10, distance_first=True)
    assert by_distance[0].word == "because"
    assert by_distance[0].distance == 1


def test_naive_match_finds_top_string_words():
    dictionary = FrequencyDictionary({"water": 5, "wafer": 7})
    topk = _topk_with_buried_letters("water", buried=set())
    assert [c.word for c in naive_dictionary_match(topk, dictionary)] == ["water"]


def test_word_accuracy():
    dictionary = FrequencyDictionary({"water": 5, "later": 9})
    index = build_index(dictionary)
    ranked = predict_words(_topk_with_buried_letters("water", buried=set()), index)
    assert [c.word for c in ranked] == ["later", "water"]
    assert top_k_word_accuracy([ranked], ["water"], 1) == 0.0
    assert top_k_word_accuracy([ranked], ["water"], 2) == 1.0
    with pytest.raises(ConfigError):
        top_k_word_accuracy([ranked], [], 1)
    with pytest.raises(ConfigError):
        predict_words(_topk_with_buried_letters("water", set()), index, top_w=0)


def test_corrupt_topk_properties(rng):
    for word in ["a", "hello", "information"]:
        topk = corrupt_topk(word, rng)
        assert len(topk) == len(word)
        demoted = 0
        for letter, candidates in zip(word, topk):
            letters = [c for c, _ in candidates]
            assert [p for _, p in candidates] == list(RANK_PROBABILITIES)
            assert len(set(letters)) == len(RANK_PROBABILITIES)
            assert letter in letters
            demoted += letters[0] != letter
        assert demoted <= 2


@pytest.mark.slow
def test_corruption_benchmark_on_builtin_dictionary():
    dictionary = load_dictionary(BUILTIN_DICTIONARY)
    index = build_index(dictionary, max_edit=2)
    rng = np.random.default_rng(0)
    vocabulary = sorted(dictionary)
    words = [vocabulary[i] for i in rng.choice(len(vocabulary), size=300, replace=False)]
    by_distance, naive = [], []
    for word in words:
        topk = corrupt_topk(word, rng)
        by_distance.append(predict_words(topk, index, top_w=100, distance_first=True))
        naive.append(naive_dictionary_match(topk, dictionary))
    assert top_k_word_accuracy(by_distance, words, 100) >= 0.7
    for k in (1, 10, 50, 100):
        assert top_k_word_accuracy(by_distance, words, k) >= top_k_word_accuracy(naive, words, k)
