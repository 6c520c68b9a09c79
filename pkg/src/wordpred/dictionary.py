"""
Frequency Dictionary
Word -> count mapping loaded from ``word<TAB>count`` text files.
"""

import logging
import os
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Tuple

from src.errors import DataError, IoError, ParseError

logger = logging.getLogger(__name__)

WORD_PATTERN = re.compile(r"^[a-z]+$")
BUILTIN_DICTIONARY = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "common_words.tsv")


def is_valid_word(word: str) -> bool:
    return bool(WORD_PATTERN.match(word))


@dataclass(frozen=True)
class FrequencyDictionary:
    """Lowercase a-z words with positive counts; ``skipped`` counts rejected source lines."""
    entries: Mapping[str, int]
    skipped: int = field(default=0, compare=False)

    def __post_init__(self):
        clean: Dict[str, int] = {}
        for word, count in dict(self.entries).items():
            if not is_valid_word(word):
                raise DataError(f"dictionary word {word!r} is not lowercase a-z")
            if int(count) != count or count <= 0:
                raise DataError(f"count for {word!r} must be a positive integer, got {count}")
            clean[word] = int(count)
        object.__setattr__(self, "entries", clean)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def frequency(self, word: str) -> int:
        return self.entries.get(word, 0)

    def most_common(self, n: int) -> Iterable[Tuple[str, int]]:
        return sorted(self.entries.items(), key=lambda item: (-item[1], item[0]))[:n]


def load_dictionary(path: str = BUILTIN_DICTIONARY) -> FrequencyDictionary:
    """
    Parse a UTF-8 ``word<TAB>count`` file.

    Words are lowercased; words that are still not a-z are skipped and counted,
    repeated words have their counts summed. Blank lines are ignored.

    Raises:
        IoError: file missing
        ParseError: a line without a tab-separated positive integer count
    """
    if not os.path.isfile(path):
        raise IoError(f"dictionary not found: {path}")
    entries: Dict[str, int] = {}
    skipped = 0
    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected 'word<TAB>count'", line=line_no)
            word, count_text = parts[0].strip().lower(), parts[1].strip()
            try:
                count = int(count_text)
            except ValueError:
                raise ParseError(f"count {count_text!r} is not an integer", line=line_no) from None
            if count <= 0:
                raise ParseError(f"count must be positive, got {count}", line=line_no)
            if not is_valid_word(word):
                skipped += 1
                continue
            entries[word] = entries.get(word, 0) + count
    if skipped:
        logger.warning("skipped %d dictionary entries outside a-z in %s", skipped, path)
    return FrequencyDictionary(entries, skipped)
