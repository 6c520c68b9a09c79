"""
SymSpell Index
Symmetric-delete spelling correction: every dictionary word is stored under
all of its deletion variants (up to ``max_edit`` deletions). A lookup
generates the same variants of the query, collects the words sharing a
variant and keeps those whose true edit distance is within ``max_edit``.

Edit distance is the optimal string alignment form of Damerau-Levenshtein
(insertions, deletions, substitutions, adjacent transpositions).
"""

from dataclasses import dataclass
from typing import Dict, List, Set, Tuple

from src.errors import ConfigError, DataError
from src.wordpred.dictionary import FrequencyDictionary, is_valid_word

MAX_SUPPORTED_EDIT = 3


@dataclass(frozen=True)
class WordCandidate:
    word: str
    frequency: int
    distance: int


def deletes(word: str, max_edit: int) -> Set[str]:
    """All strings reachable from ``word`` by at most ``max_edit`` deletions (word included)."""
    variants = {word}
    queue = [word]
    for _ in range(max_edit):
        next_queue = []
        for item in queue:
            for c in range(len(item)):
                shorter = item[:c] + item[c + 1:]
                if shorter not in variants:
                    variants.add(shorter)
                    next_queue.append(shorter)
        queue = next_queue
    return variants


def edit_distance(seq1: str, seq2: str) -> int:
    """
    Optimal string alignment distance, keeping only three rows of the DP table.

    The leftmost column is stored at the end of each row so index -1 reaches it.
    """
    oneago = None
    thisrow = list(range(1, len(seq2) + 1)) + [0]
    for x in range(len(seq1)):
        twoago, oneago, thisrow = oneago, thisrow, [0] * len(seq2) + [x + 1]
        for y in range(len(seq2)):
            delcost = oneago[y] + 1
            addcost = thisrow[y - 1] + 1
            subcost = oneago[y - 1] + (seq1[x] != seq2[y])
            thisrow[y] = min(delcost, addcost, subcost)
            if (x > 0 and y > 0 and seq1[x] == seq2[y - 1]
                    and seq1[x - 1] == seq2[y] and seq1[x] != seq2[y]):
                thisrow[y] = min(thisrow[y], twoago[y - 2] + 1)
    return thisrow[len(seq2) - 1]


class SymSpellIndex:
    """Immutable after construction; lookups are safe to run concurrently."""

    def __init__(self, dictionary: FrequencyDictionary, max_edit: int = 2):
        if int(max_edit) != max_edit or not 0 <= max_edit <= MAX_SUPPORTED_EDIT:
            raise ConfigError(f"max_edit must be one of 0..{MAX_SUPPORTED_EDIT}, got {max_edit}")
        self.dictionary = dictionary
        self.max_edit = int(max_edit)
        delete_map: Dict[str, List[str]] = {}
        for word in sorted(dictionary):
            for variant in deletes(word, self.max_edit):
                delete_map.setdefault(variant, []).append(word)
        self.delete_map: Dict[str, Tuple[str, ...]] = {k: tuple(v) for k, v in delete_map.items()}

    def __len__(self) -> int:
        return len(self.dictionary)

    def lookup(self, term: str) -> List[WordCandidate]:
        """
        Every dictionary word within ``max_edit`` of ``term``, sorted by
        (distance, frequency desc, word).
        """
        if term and not is_valid_word(term):
            raise DataError(f"lookup term {term!r} is not lowercase a-z")
        candidates: Set[str] = set()
        for variant in deletes(term, self.max_edit):
            candidates.update(self.delete_map.get(variant, ()))
        found = []
        for word in candidates:
            if abs(len(word) - len(term)) > self.max_edit:
                continue
            distance = edit_distance(term, word)
            if distance <= self.max_edit:
                found.append(WordCandidate(word, self.dictionary.frequency(word), distance))
        found.sort(key=lambda c: (c.distance, -c.frequency, c.word))
        return found


def build_index(dictionary: FrequencyDictionary, max_edit: int = 2) -> SymSpellIndex:
    """
    Raises:
        ConfigError: max_edit outside 0..3
    """
    return SymSpellIndex(dictionary, max_edit)


def lookup(term: str, index: SymSpellIndex) -> List[WordCandidate]:
    return index.lookup(term)
