"""Shared text utilities: tokenization, normalization, stop words."""

from __future__ import annotations

import re
import string

# Tokens are runs of letters/digits; decimal points survive only inside numbers
# ("0.97" is one token, "u.s." is ["u", "s"]).
_TOKEN_RE = re.compile(r"\d+(?:\.\d+)+|[a-z0-9]+")

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)

# Standard English stop words plus fillers that dominate generated questions
# (interrogatives and fiscal-calendar markers carry no topical signal).
STANDARD_STOPWORDS = frozenset("""
i me my myself we our ours ourselves you your yours yourself yourselves he him
his himself she her hers herself it its itself they them their theirs
themselves what which who whom this that these those am is are was were be
been being have has had having do does did doing a an the and but if or
because as until while of at by for with about against between into through
during before after above below to from up down in out on off over under
again further then once here there when where why how all any both each few
more most other some such no nor not only own same so than too very s t can
will just don should now
""".split())

QUESTION_STOPWORDS = STANDARD_STOPWORDS | {"q1", "q2", "q3", "q4", "fy", "qtrly"}


def tokenize(text: str) -> list[str]:
    """Lowercase and split into word/number tokens.

    Splits on any character that is not a letter or digit, except that a `.`
    between digits is kept so decimal values stay intact.
    """
    return _TOKEN_RE.findall(text.lower())


def normalize_text(text: str) -> str:
    """Canonical form for exact-match deduplication.

    Lowercases, strips punctuation characters, and collapses whitespace.
    """
    return " ".join(text.lower().translate(_PUNCT_TABLE).split())


def word_count(text: str) -> int:
    """Whitespace token count."""
    return len(text.split())


def load_stopwords(path) -> frozenset[str]:
    """Read a stop-word file (one word per line, blank lines ignored)."""
    with open(path, encoding="utf-8") as fh:
        words = {line.strip().lower() for line in fh if line.strip()}
    return frozenset(words)
