"""Penn Treebank word tokenization used as the prompt cost objective.

The rule cascade reproduces NLTK's ``TreebankWordTokenizer`` (itself a port of
Robert McIntyre's ``tokenizer.sed``). Counts are pinned by the golden corpus in
``tests/data``; NLTK is only needed to regenerate that corpus.

Notable conventions kept from the reference:

- only a period at the very end of the text is split off (``"York. Please"``
  keeps ``"York."`` whole);
- double quotes are rewritten as ``````/``''`` tokens;
- commas and colons are split unless followed by a digit (``3,5`` stays whole);
- hyphens inside words are untouched, accented letters are ordinary letters.
"""
from __future__ import annotations

import re

__all__ = ["tokenize", "count_tokens"]

_STARTING_QUOTES = [
    (re.compile(r'^"'), r"``"),
    (re.compile(r"(``)"), r" \1 "),
    (re.compile(r"([ \(\[{<])(\"|\'{2})"), r"\1 `` "),
]

_PUNCTUATION = [
    (re.compile(r"([:,])([^\d])"), r" \1 \2"),
    (re.compile(r"([:,])$"), r" \1 "),
    (re.compile(r"\.\.\."), r" ... "),
    (re.compile(r"[;@#$%&]"), r" \g<0> "),
    # final period, possibly followed by closing brackets/quotes
    (re.compile(r'([^\.])(\.)([\]\)}>"\']*)\s*$'), r"\1 \2\3 "),
    (re.compile(r"[?!]"), r" \g<0> "),
    (re.compile(r"([^'])' "), r"\1 ' "),
]

_PARENS_BRACKETS = (re.compile(r"[\]\[\(\)\{\}\<\>]"), r" \g<0> ")
_DOUBLE_DASHES = (re.compile(r"--"), r" -- ")

_ENDING_QUOTES = [
    (re.compile(r"''"), " '' "),
    (re.compile(r'"'), " '' "),
    (re.compile(r"([^' ])('[sS]|'[mM]|'[dD]|') "), r"\1 \2 "),
    (re.compile(r"([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) "), r"\1 \2 "),
]

_CONTRACTIONS2 = [
    re.compile(p)
    for p in (
        r"(?i)\b(can)(not)\b",
        r"(?i)\b(d)('ye)\b",
        r"(?i)\b(gim)(me)\b",
        r"(?i)\b(gon)(na)\b",
        r"(?i)\b(got)(ta)\b",
        r"(?i)\b(lem)(me)\b",
        r"(?i)\b(more)('n)\b",
        r"(?i)\b(wan)(na)(?=\s)",
    )
]
_CONTRACTIONS3 = [re.compile(r"(?i) ('t)(is)\b"), re.compile(r"(?i) ('t)(was)\b")]


def tokenize(text: str) -> list[str]:
    """Split ``text`` into Treebank word tokens.

    >>> tokenize("Classifique este sentimento como positivo ou negativo.")
    ['Classifique', 'este', 'sentimento', 'como', 'positivo', 'ou', 'negativo', '.']
    >>> tokenize("")
    []
    """
    for regexp, sub in _STARTING_QUOTES:
        text = regexp.sub(sub, text)
    for regexp, sub in _PUNCTUATION:
        text = regexp.sub(sub, text)

    regexp, sub = _PARENS_BRACKETS
    text = regexp.sub(sub, text)
    regexp, sub = _DOUBLE_DASHES
    text = regexp.sub(sub, text)

    text = f" {text} "
    for regexp, sub in _ENDING_QUOTES:
        text = regexp.sub(sub, text)
    for regexp in _CONTRACTIONS2:
        text = regexp.sub(r" \1 \2 ", text)
    for regexp in _CONTRACTIONS3:
        text = regexp.sub(r" \1 \2 ", text)

    return text.split()


def count_tokens(text: str) -> int:
    """Number of Treebank tokens in ``text``; this is the cost objective."""
    return len(tokenize(text))
