"""
Word Predictor
Turns per-position top-k letter predictions into ranked dictionary words:
beam-limited generation of candidate strings, SymSpell lookup of every
candidate, and the naive exact-match baseline.
"""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ConfigError, EmptyInputError
from src.wordpred.dictionary import FrequencyDictionary
from src.wordpred.symspell import SymSpellIndex, WordCandidate

LetterCandidates = Sequence[Sequence[Tuple[str, float]]]

DEFAULT_BEAM = 500
DEFAULT_TOP_W = 100


def generate_combinations(topk_letters: LetterCandidates, beam_width: Optional[int] = DEFAULT_BEAM,
                          exhaustive: bool = False) -> List[Tuple[str, float]]:
    """
    Highest-probability strings taking one candidate per position.

    Each prefix keeps only the ``beam_width`` best extensions, ordered by
    (probability product desc, string). Products are accumulated left to
    right, so the beam returns exactly the top ``beam_width`` strings of the
    full enumeration. ``exhaustive=True`` (or ``beam_width=None``) disables
    the limit.

    Raises:
        EmptyInputError: no positions, or a position without candidates
        ConfigError: beam_width < 1
    """
    if not topk_letters:
        raise EmptyInputError("no letter positions to combine")
    if not exhaustive and beam_width is not None and beam_width < 1:
        raise ConfigError(f"beam_width must be >= 1, got {beam_width}")
    limit = None if exhaustive else beam_width

    beam: List[Tuple[str, float]] = [("", 1.0)]
    for position, candidates in enumerate(topk_letters):
        if not candidates:
            raise EmptyInputError(f"position {position} has no candidates")
        expanded = [(prefix + letter, prob * float(p)) for prefix, prob in beam for letter, p in candidates]
        expanded.sort(key=lambda item: (-item[1], item[0]))
        beam = expanded if limit is None else expanded[:limit]
    return beam


def _rank_words(best: Dict[str, WordCandidate], top_w: int, distance_first: bool) -> List[WordCandidate]:
    if distance_first:
        key = lambda c: (c.distance, -c.frequency, c.word)
    else:
        key = lambda c: (-c.frequency, c.distance, c.word)
    return sorted(best.values(), key=key)[:top_w]


def predict_words(topk_letters: LetterCandidates, index: SymSpellIndex, top_w: int = DEFAULT_TOP_W,
                  beam_width: int = DEFAULT_BEAM, distance_first: bool = False) -> List[WordCandidate]:
    """
    Union of SymSpell suggestions over all generated strings.

    Each word keeps its smallest distance. Ordering is by frequency, then
    distance, then the word; ``distance_first`` sorts by distance before
    frequency instead.
    """
    if top_w < 1:
        raise ConfigError(f"top_w must be >= 1, got {top_w}")
    best: Dict[str, WordCandidate] = {}
    for term, _ in generate_combinations(topk_letters, beam_width):
        for candidate in index.lookup(term):
            known = best.get(candidate.word)
            if known is None or candidate.distance < known.distance:
                best[candidate.word] = candidate
    return _rank_words(best, top_w, distance_first)


def naive_dictionary_match(topk_letters: LetterCandidates, dictionary: FrequencyDictionary,
                           beam_width: int = DEFAULT_BEAM) -> List[WordCandidate]:
    """Generated strings that are dictionary words, most frequent first."""
    found = {
        term: WordCandidate(term, dictionary.frequency(term), 0)
        for term, _ in generate_combinations(topk_letters, beam_width)
        if term in dictionary
    }
    return sorted(found.values(), key=lambda c: (-c.frequency, c.word))


def top_k_word_accuracy(predictions: Sequence[Sequence[WordCandidate]], truth: Sequence[str], k: int) -> float:
    if len(predictions) != len(truth):
        raise ConfigError(f"{len(predictions)} predictions but {len(truth)} words")
    if len(truth) == 0:
        raise EmptyInputError("word accuracy of an empty set")
    hits = sum(1 for ranked, word in zip(predictions, truth) if word in [c.word for c in ranked[:k]])
    return hits / len(truth)


# ============================================================================
# CORRUPTION BENCHMARK
# ============================================================================

RANK_PROBABILITIES = (0.5, 0.2, 0.15, 0.1, 0.05)
ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def corrupt_topk(word: str, rng: np.random.Generator, max_corrupted: int = 2,
                 probabilities: Sequence[float] = RANK_PROBABILITIES) -> List[List[Tuple[str, float]]]:
    """
    Simulated classifier output for ``word``: per position a top-k list in
    which the true letter is ranked first, except at up to ``max_corrupted``
    random positions where it sits at rank 2..k behind a wrong letter.
    """
    k = len(probabilities)
    n_bad = int(rng.integers(0, min(max_corrupted, len(word)) + 1))
    bad_positions = set(rng.choice(len(word), size=n_bad, replace=False).tolist()) if n_bad else set()
    positions = []
    for i, letter in enumerate(word):
        others = [c for c in ALPHABET if c != letter]
        picked = rng.choice(len(others), size=k - 1, replace=False)
        letters = [others[j] for j in picked]
        rank = int(rng.integers(1, k)) if i in bad_positions else 0
        letters.insert(rank, letter)
        positions.append(list(zip(letters, probabilities)))
    return positions
