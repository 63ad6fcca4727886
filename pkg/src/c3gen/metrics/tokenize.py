"""Deterministic tokenization for metric computation.

Rule: lowercase, split on Unicode whitespace, strip leading/trailing
punctuation from each token, keep interior punctuation (so ``foo.bar``
stays one token), drop tokens that strip to nothing. Tokenizing the
joined token list again is a no-op.
"""

from __future__ import annotations

import string
import unicodedata

_ASCII_PUNCT = set(string.punctuation)


def _strippable(ch: str) -> bool:
    return ch in _ASCII_PUNCT or unicodedata.category(ch).startswith("P")


def _strip_punct(token: str) -> str:
    start = 0
    end = len(token)
    while start < end and _strippable(token[start]):
        start += 1
    while end > start and _strippable(token[end - 1]):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens of ``text`` under the fixed rule above."""
    if not text:
        return []
    out = []
    for raw in text.lower().split():
        token = _strip_punct(raw)
        if token:
            out.append(token)
    return out
