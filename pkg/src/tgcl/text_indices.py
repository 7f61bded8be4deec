"""Linguistic complexity indices: readability formulas and shallow features.

Operand extraction is pinned so every formula is reproducible: sentences
split on [.!?]+ followed by whitespace or end of text; tokens are whitespace
chunks stripped of leading/trailing non-alphanumerics; characters count
letters and digits; syllables count maximal aeiouy runs, dropping a trailing
silent 'e', with a minimum of one per token.

Any formula term with a zero denominator evaluates to 0, so empty text
yields a constant, finite score for every index.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DomainError

_SENTENCE_SPLIT = re.compile(r"[.!?]+(?=\s|$)")
_VOWEL_RUNS = re.compile(r"[aeiouy]+")
_EDGE_PUNCT = re.compile(r"^[^0-9A-Za-z]+|[^0-9A-Za-z]+$")

TRAF_KINDS = (
    "gunning_fog", "new_ari", "flesch_kincaid_grade",
    "linsear_write", "coleman_liau", "smog",
)
SHAF_KINDS = (
    "avg_chars_per_token", "avg_chars_per_sentence", "avg_syllables_per_token",
    "avg_syllables_per_sentence", "sentence_length", "token_sentence_ratio",
    "token_sentence_multiply",
)
TEXT_INDEX_KINDS = TRAF_KINDS + SHAF_KINDS

TEXT_INDEX_CATEGORIES = {k: "traf" for k in TRAF_KINDS}
TEXT_INDEX_CATEGORIES.update({k: "shaf" for k in SHAF_KINDS})


@dataclass(frozen=True)
class TextStats:
    sentences: int = 0
    tokens: int = 0
    characters: int = 0
    syllables: int = 0
    complex_words: int = 0
    polysyllables: int = 0
    easy_words: int = 0
    hard_words: int = 0


def count_syllables(token: str) -> int:
    w = token.lower()
    runs = len(_VOWEL_RUNS.findall(w))
    if runs > 1 and w.endswith("e") and w[-2] not in "aeiouy":
        runs -= 1
    return max(1, runs)


def tokenize(text: str) -> list[str]:
    out = []
    for chunk in text.split():
        token = _EDGE_PUNCT.sub("", chunk)
        if token:
            out.append(token)
    return out


def count_sentences(text: str) -> int:
    return sum(1 for part in _SENTENCE_SPLIT.split(text) if part.strip())


def analyze_text(text: str) -> TextStats:
    """Extract the formula operands from raw text (empty text -> all zeros)."""
    tokens = tokenize(text)
    syllable_counts = [count_syllables(t) for t in tokens]
    n_complex = sum(1 for s in syllable_counts if s >= 3)
    return TextStats(
        sentences=count_sentences(text),
        tokens=len(tokens),
        characters=sum(1 for c in text if c.isalnum()),
        syllables=sum(syllable_counts),
        complex_words=n_complex,
        polysyllables=n_complex,
        easy_words=len(tokens) - n_complex,
        hard_words=n_complex,
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def compute_text_index(kind: str, stats: TextStats) -> float:
    """Evaluate one readability or shallow index from extracted stats."""
    w, s, c = stats.tokens, stats.sentences, stats.characters
    if kind == "gunning_fog":
        return 0.4 * (_ratio(w, s) + 100.0 * _ratio(stats.complex_words, w))
    if kind == "new_ari":
        return 4.71 * (_ratio(c, w) + 0.5 * _ratio(w, s))
    if kind == "flesch_kincaid_grade":
        return 0.39 * (_ratio(w, s) + 11.8 * _ratio(stats.syllables, w))
    if kind == "linsear_write":
        r = _ratio(stats.easy_words + 3.0 * stats.hard_words, s)
        return r / 2.0 if r > 20.0 else r / 2.0 - 1.0
    if kind == "coleman_liau":
        return 0.0588 * _ratio(100.0 * c, w) - 0.296 * _ratio(100.0 * s, w) - 15.8
    if kind == "smog":
        return 1.0430 * math.sqrt(_ratio(30.0 * stats.polysyllables, s)) + 3.1291
    if kind == "avg_chars_per_token":
        return _ratio(c, w)
    if kind == "avg_chars_per_sentence":
        return _ratio(c, s)
    if kind == "avg_syllables_per_token":
        return _ratio(stats.syllables, w)
    if kind == "avg_syllables_per_sentence":
        return _ratio(stats.syllables, s)
    if kind == "sentence_length":
        return _ratio(w, s)
    if kind == "token_sentence_ratio":
        if w < 1 or s < 1:
            return 0.0
        return _ratio(math.log(w), math.log(s))
    if kind == "token_sentence_multiply":
        return math.sqrt(w * s)
    raise DomainError(f"unknown text index kind {kind!r}")


def score_text(kind: str, text: str) -> float:
    return compute_text_index(kind, analyze_text(text))
