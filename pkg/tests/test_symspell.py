import itertools

import pytest

from src.errors import ConfigError, DataError
from src.wordpred.dictionary import FrequencyDictionary
from src.wordpred.symspell import SymSpellIndex, WordCandidate, build_index, deletes, edit_distance, lookup


def _osa(a, b):
    """Plain full-table optimal string alignment distance."""
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        d[i][0] = i
    for j in range(len(b) + 1):
        d[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                d[i][j] = min(d[i][j], d[i - 2][j - 2] + 1)
    return d[len(a)][len(b)]


@pytest.mark.parametrize("a, b, expected", [
    ("ab", "ba", 1),
    ("ca", "abc", 3),
    ("kitten", "sitting", 3),
    ("", "", 0),
    ("", "abc", 3),
    ("abc", "", 3),
    ("word", "word", 0),
])
def test_edit_distance_cases(a, b, expected):
    assert edit_distance(a, b) == expected


def test_edit_distance_matches_full_table():
    words = ["".join(p) for n in range(4) for p in itertools.product("abc", repeat=n)]
    for a in words:
        for b in words:
            assert edit_distance(a, b) == _osa(a, b), (a, b)


def test_deletes():
    assert deletes("abc", 1) == {"abc", "bc", "ac", "ab"}
    assert deletes("ab", 2) == {"ab", "a", "b", ""}
    assert deletes("abc", 0) == {"abc"}


def test_lookup_finds_exactly_the_words_within_max_edit():
    dictionary = FrequencyDictionary({"hello": 50, "help": 30, "hell": 80, "yellow": 10, "world": 90})
    index = build_index(dictionary, max_edit=2)
    found = lookup("helo", index)
    expected = {w for w in dictionary if _osa("helo", w) <= 2}
    assert {c.word for c in found} == expected
    assert found[0] == WordCandidate("hell", 80, 1)
    keys = [(c.distance, -c.frequency, c.word) for c in found]
    assert keys == sorted(keys)


def test_zero_edit_index_is_exact_match():
    index = SymSpellIndex(FrequencyDictionary({"cat": 3, "cart": 1}), max_edit=0)
    assert [c.word for c in index.lookup("cat")] == ["cat"]
    assert index.lookup("cot") == []
    assert len(index) == 2


def test_index_errors():
    dictionary = FrequencyDictionary({"cat": 1})
    with pytest.raises(ConfigError):
        SymSpellIndex(dictionary, max_edit=4)
    with pytest.raises(ConfigError):
        build_index(dictionary, max_edit=-1)
    with pytest.raises(DataError):
        build_index(dictionary).lookup("Cat")


def _mutate(word, rng, edits):
    letters = "abcdefghijklmnopqrstuvwxyz"
    for _ in range(edits):
        op = rng.integers(3) if len(word) > 1 else 1
        at = int(rng.integers(len(word) + (op == 1)))
        if op == 0:
            word = word[:at] + word[at + 1:]
        elif op == 1:
            word = word[:at] + letters[rng.integers(26)] + word[at:]
        else:
            word = word[:at] + letters[rng.integers(26)] + word[at + 1:]
    return word


@pytest.mark.slow
def test_lookup_matches_full_scan_on_random_dictionary(rng):
    letters = list("abcdefghijklmnopqrstuvwxyz")
    counts = {}
    while len(counts) < 1000:
        word = "".join(rng.choice(letters, size=int(rng.integers(3, 9))))
        counts[word] = int(rng.integers(1, 10_000))
    dictionary = FrequencyDictionary(counts)
    index = build_index(dictionary, max_edit=2)
    vocabulary = sorted(counts)

    for _ in range(200):
        query = _mutate(vocabulary[rng.integers(len(vocabulary))], rng, int(rng.integers(0, 3)))
        expected = sorted(
            (d, -counts[w], w) for w in vocabulary if (d := _osa(query, w)) <= 2
        )
        found = [(c.distance, -c.frequency, c.word) for c in lookup(query, index)]
        assert found == expected, query
