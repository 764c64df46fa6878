"""Text normalization, sentence segmentation and tokenization.

These are the corpus-wide rules every other module builds on: Unicode NFC,
lowercase folding, accents preserved (with an accent-stripped shadow form for
fuzzy-but-deterministic matching of OCR-era orthography), punctuation as its
own tokens, and hyphenated line-break artifacts ("tormen-\\nta") rejoined
before tokenization.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

# Combining marks dropped by strip_accents: acute and diaeresis. The tilde
# (ñ) is a distinct letter in Spanish and is preserved.
_STRIPPED_MARKS = {"́", "̈"}

_HYPHEN_BREAK = re.compile(r"(\w)-[ \t]*\n\s*(\w)", re.UNICODE)
# Word tokens are letter/digit runs (underscore excluded); any other
# non-space character is a single punctuation token.
_TOKEN = re.compile(r"[^\W_]+|[^\w\s]", re.UNICODE)

_SENTENCE_PUNCT = ".!?;"

# Honorifics and other common abbreviations of the period that must not end a
# sentence even when followed by a capitalized word.
ABBREVIATIONS = {
    "sr", "sra", "srta", "sres", "d", "dn", "da", "dr", "dra", "don",
    "gral", "cnel", "cap", "tte", "sgto", "exmo", "excmo", "ilmo", "lic",
    "pbro", "fr", "mons", "ud", "vd", "uds", "vds", "etc", "no", "num",
    "núm", "art", "pag", "pág", "vol", "cia", "cía", "ca", "st", "sta",
}


def normalize_term(surface: str) -> str:
    """Canonical form of a token: NFC + lowercase, accents preserved."""
    return unicodedata.normalize("NFC", surface).lower()


def strip_accents(term: str) -> str:
    """Accent-stripped shadow form (á→a, ü→u; ñ kept)."""
    decomposed = unicodedata.normalize("NFD", term)
    kept = "".join(ch for ch in decomposed if ch not in _STRIPPED_MARKS)
    return unicodedata.normalize("NFC", kept)


def fold(term: str) -> str:
    """Normalize then strip accents; the lookup key used for fuzzy matching."""
    return strip_accents(normalize_term(term))


def rejoin_hyphen_breaks(text: str) -> str:
    return _HYPHEN_BREAK.sub(r"\1\2", text)


def _is_abbreviation(text: str, dot_index: int) -> bool:
    j = dot_index
    start = j
    while start > 0 and (text[start - 1].isalnum() or text[start - 1] in ".'"):
        start -= 1
    word = text[start:j].rstrip(".")
    if not word:
        return False
    return fold(word) in ABBREVIATIONS


def segment_sentences(raw_text: str) -> list[str]:
    """Split text into sentences.

    Boundaries sit after ``. ! ? ;`` followed by whitespace and a capital
    letter (optionally behind opening ¿¡ or quotes); an abbreviation guard
    keeps "Sr. Pérez" together. Sentences are contiguous slices of the input
    with surrounding whitespace trimmed, so their concatenation reproduces
    the input modulo inter-sentence whitespace.
    """
    if not raw_text or not raw_text.strip():
        return []
    sentences: list[str] = []
    start = 0
    i = 0
    n = len(raw_text)
    while i < n:
        ch = raw_text[i]
        if ch in _SENTENCE_PUNCT:
            # consume a run of closing punctuation (e.g. ?! or .")
            j = i + 1
            while j < n and raw_text[j] in "\"'”’)»" + _SENTENCE_PUNCT:
                j += 1
            k = j
            while k < n and raw_text[k].isspace():
                k += 1
            if k == n:
                i = j
                continue
            if k == j:  # no whitespace after the punctuation: not a boundary
                i = j
                continue
            nxt = raw_text[k]
            while k < n and nxt in "¿¡\"'“‘(«":
                k += 1
                nxt = raw_text[k] if k < n else ""
            if nxt and nxt.isupper():
                if ch == "." and _is_abbreviation(raw_text, i):
                    i = j
                    continue
                sentences.append(raw_text[start:j].strip())
                start = j
                i = k
                continue
            i = j
            continue
        i += 1
    tail = raw_text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


@dataclass(frozen=True)
class Token:
    """A surface token with its normalized form and sentence-local position."""

    surface: str
    normalized: str
    sentence_index: int
    position: int

    @property
    def is_punct(self) -> bool:
        return not any(c.isalnum() for c in self.surface)


def tokenize(sentence: str, sentence_index: int = 0) -> list[Token]:
    """Tokenize one sentence: hyphen line-breaks rejoined, punctuation split
    into its own tokens, positions consecutive from 0."""
    joined = rejoin_hyphen_breaks(sentence)
    tokens: list[Token] = []
    for pos, match in enumerate(_TOKEN.finditer(joined)):
        surface = match.group(0)
        tokens.append(Token(surface, normalize_term(surface), sentence_index, pos))
    return tokens


def tokenize_text(raw_text: str) -> list[list[Token]]:
    """Segment + tokenize; one token list per sentence."""
    return [
        tokenize(sentence, index)
        for index, sentence in enumerate(segment_sentences(raw_text))
    ]


def flat_tokens(raw_text: str) -> list[Token]:
    return [tok for sent in tokenize_text(raw_text) for tok in sent]
