"""Tokenization, stopword removal, Porter stemming, and sentence splitting.

Everything here is pure and deterministic. The same ``tokenize`` ->
``remove_stopwords`` -> ``stem`` chain backs indexing, query building, and
the baseline lexical scorer; the summarizer reuses ``tokenize`` and
``split_sentences`` but matches lexicon entries on unstemmed tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

# Classic 33-word English stoplist used by standard analyzers.
DEFAULT_STOPWORDS = frozenset(
    """a an and are as at be but by for if in into is it no not of on or such
    that the their then there these they this to was will with""".split()
)

# Trailing tokens (lowercased, with final period) that do not end a sentence.
DEFAULT_ABBREVIATIONS = frozenset(
    {
        "dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "jr.", "sr.", "vs.",
        "e.g.", "i.e.", "b.i.d.", "t.i.d.", "q.i.d.", "q.h.s.", "p.r.n.",
        "p.o.", "a.m.", "p.m.",
    }
)

_WORD_RE = re.compile(r"\w+", re.UNICODE)
_SENT_PUNCT_RE = re.compile(r"[.!?]+")


@dataclass(frozen=True)
class Token:
    """One word token with its surface form and character span."""

    surface: str
    normalized: str
    start: int
    end: int


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[Token, ...]

    def normalized(self) -> list[str]:
        return [t.normalized for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)


def tokenize(text: str) -> TokenStream:
    """Split on word boundaries, lowercase, keep character offsets.

    Punctuation never appears as a token; digit runs are kept ("114/65"
    yields "114" and "65").
    """
    tokens = tuple(
        Token(m.group(), m.group().lower(), m.start(), m.end())
        for m in _WORD_RE.finditer(text)
    )
    return TokenStream(tokens)


def remove_stopwords(
    stream: TokenStream, stoplist: frozenset[str] = DEFAULT_STOPWORDS
) -> TokenStream:
    """Drop tokens whose normalized form is in the stoplist; order is kept."""
    return TokenStream(tuple(t for t in stream if t.normalized not in stoplist))


def load_wordlist(path: str | Path) -> frozenset[str]:
    """Read one lowercase entry per line; blank lines and # comments skipped."""
    entries = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            entries.append(line.lower())
    return frozenset(entries)


# ---------------------------------------------------------------------------
# Porter stemmer (1980), all five steps as published.
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


def _is_cons(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        # y is a consonant only when not preceded by a consonant
        return True if i == 0 else not _is_cons(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel-consonant sequences: [C](VC)^m[V]."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        cons = _is_cons(stem, i)
        if prev_vowel and cons:
            m += 1
        prev_vowel = not cons
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_cons(stem, i) for i in range(len(stem)))


def _ends_double_cons(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_cons(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    # *o: ends consonant-vowel-consonant where the final consonant is not w/x/y
    if len(word) < 3:
        return False
    return (
        _is_cons(word, len(word) - 3)
        and not _is_cons(word, len(word) - 2)
        and _is_cons(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


# Rule tables, longest suffix first. Within a step only the longest matching
# suffix is considered; if its condition fails no other rule applies.
_STEP2 = (
    ("ational", "ate"), ("ization", "ize"), ("iveness", "ive"),
    ("fulness", "ful"), ("ousness", "ous"), ("biliti", "ble"),
    ("tional", "tion"), ("ation", "ate"), ("alism", "al"), ("aliti", "al"),
    ("iviti", "ive"), ("entli", "ent"), ("ousli", "ous"), ("anci", "ance"),
    ("enci", "ence"), ("izer", "ize"), ("abli", "able"), ("alli", "al"),
    ("ator", "ate"), ("eli", "e"),
)
_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ness", ""), ("ful", ""),
)
_STEP4 = (
    "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ion",
    "ism", "ate", "iti", "ous", "ive", "ize", "al", "er", "ic", "ou",
)


def stem(token: str) -> str:
    """Return the Porter (1980) stem of a token (lowercased first)."""
    word = token.lower()

    # Step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("ss"):
        pass
    elif word.endswith("s"):
        word = word[:-1]

    # Step 1b
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    else:
        trimmed = False
        if word.endswith("ed") and _has_vowel(word[:-2]):
            word = word[:-2]
            trimmed = True
        elif word.endswith("ing") and _has_vowel(word[:-3]):
            word = word[:-3]
            trimmed = True
        if trimmed:
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_cons(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure(word) == 1 and _ends_cvc(word):
                word += "e"

    # Step 1c
    if word.endswith("y") and _has_vowel(word[:-1]):
        word = word[:-1] + "i"

    # Step 2
    for suffix, replacement in _STEP2:
        if word.endswith(suffix):
            base = word[: -len(suffix)]
            if _measure(base) > 0:
                word = base + replacement
            break

    # Step 3
    for suffix, replacement in _STEP3:
        if word.endswith(suffix):
            base = word[: -len(suffix)]
            if _measure(base) > 0:
                word = base + replacement
            break

    # Step 4
    for suffix in _STEP4:
        if word.endswith(suffix):
            base = word[: -len(suffix)]
            if _measure(base) > 1 and (
                suffix != "ion" or (base and base[-1] in "st")
            ):
                word = base
            break

    # Step 5a
    if word.endswith("e"):
        base = word[:-1]
        m = _measure(base)
        if m > 1 or (m == 1 and not _ends_cvc(base)):
            word = base

    # Step 5b
    if _measure(word) > 1 and _ends_double_cons(word) and word.endswith("l"):
        word = word[:-1]

    return word


def analyze(
    text: str, stoplist: frozenset[str] = DEFAULT_STOPWORDS
) -> list[str]:
    """Full term pipeline: tokenize, drop stopwords, stem.

    Empty stems (a bare "s" token stems to "") are dropped so the result
    contains only non-empty index terms.
    """
    terms = []
    for tok in remove_stopwords(tokenize(text), stoplist):
        stemmed = stem(tok.normalized)
        if stemmed:
            terms.append(stemmed)
    return terms


# ---------------------------------------------------------------------------
# Sentence splitting
# ---------------------------------------------------------------------------


def split_sentences(
    text: str, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
) -> list[tuple[str, tuple[int, int]]]:
    """Rule-based sentence splitting.

    A run of ``.!?`` ends a sentence when followed by whitespace and an
    uppercase letter, or by end of text. The non-whitespace token ending at
    the punctuation is checked (lowercased) against the abbreviation list;
    abbreviations such as "Dr." and "b.i.d." never end a sentence. Returns
    ``(sentence_text, (start, end))`` spans; spans never overlap and the
    gaps between them are pure whitespace.
    """
    breaks = []
    for m in _SENT_PUNCT_RE.finditer(text):
        end = m.end()
        rest = text[end:]
        if rest.strip():
            follow = re.match(r"\s+(\S)", rest)
            if follow is None:
                continue  # punctuation glued to the next token: not a break
            if not follow.group(1).isupper():
                continue
        # the word ending at this punctuation, e.g. "Dr." or "b.i.d."
        word_start = end
        while word_start > 0 and not text[word_start - 1].isspace():
            word_start -= 1
        word = text[word_start:end].lower().lstrip("([{\"'")
        if word in abbreviations:
            continue
        breaks.append(end)

    sentences: list[tuple[str, tuple[int, int]]] = []
    cursor = 0
    for stop in breaks:
        _append_span(text, cursor, stop, sentences)
        cursor = stop
    _append_span(text, cursor, len(text), sentences)
    return sentences


def _append_span(
    text: str,
    lo: int,
    hi: int,
    sentences: list[tuple[str, tuple[int, int]]],
) -> None:
    chunk = text[lo:hi]
    stripped = chunk.strip()
    if not stripped:
        return
    start = lo + len(chunk) - len(chunk.lstrip())
    end = start + len(stripped)
    sentences.append((stripped, (start, end)))


def sentence_texts(
    sentences: Iterable[tuple[str, tuple[int, int]]]
) -> list[str]:
    return [s for s, _ in sentences]
