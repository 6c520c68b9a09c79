"""Word prediction: frequency dictionary, SymSpell index, candidate generation."""

from src.wordpred.dictionary import BUILTIN_DICTIONARY, FrequencyDictionary, load_dictionary
from src.wordpred.predictor import (
    corrupt_topk,
    generate_combinations,
    naive_dictionary_match,
    predict_words,
    top_k_word_accuracy,
)
from src.wordpred.symspell import SymSpellIndex, WordCandidate, build_index, edit_distance, lookup

__all__ = [
    # Dictionary
    'BUILTIN_DICTIONARY',
    'FrequencyDictionary',
    'load_dictionary',

    # SymSpell
    'SymSpellIndex',
    'WordCandidate',
    'build_index',
    'lookup',
    'edit_distance',

    # Prediction
    'generate_combinations',
    'predict_words',
    'naive_dictionary_match',
    'top_k_word_accuracy',
    'corrupt_topk',
]
