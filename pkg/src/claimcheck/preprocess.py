"""Claim-text cleanup strategies applied before query generation.

Eight strategies over a TokenStream. NP is the identity; every other
strategy starts from the base cleanup P and layers one tweak on top:

* P        strip ``#``/``@`` sigils, drop emoji and punctuation, collapse
           whitespace, lowercase.
* P+ERep   as P, but each emoji becomes the literal marker ``$EMOJI$``.
* P-H      as P, hashtags dropped entirely.
* P-M      as P, mentions dropped entirely.
* P-H-M    as P, both dropped.
* P-MRR-HRR            as P, but in every run of space-separated hashtags
                       (or mentions) only the first survives.
* P-MRR-HRR+MRep       as above, then surviving mentions are replaced by
                       their display names from a handle map.

Output is the surviving token texts joined by single spaces and lowercased;
dropping a token therefore never glues its neighbours together ("can't"
comes out as "can t", and adjacent emoji markers are space-separated).
URL tokens are noise for querying and are dropped by every strategy except
NP (dataset curation removes them upstream anyway). The ``$EMOJI$`` marker
keeps its case and survives re-processing under P+ERep, which makes every
strategy idempotent on its own output.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, InputValidationError
from .lexer import Token, TokenKind, TokenStream, tokenize

EMOJI_MARKER = "$EMOJI$"


class Strategy(enum.Enum):
    NP = "np"
    P = "p"
    P_EREP = "p+erep"
    P_H = "p-h"
    P_M = "p-m"
    P_H_M = "p-h-m"
    P_MRR_HRR = "p-mrr-hrr"
    P_MRR_HRR_MREP = "p-mrr-hrr+mrep"

    @classmethod
    def from_string(cls, label: str) -> "Strategy":
        try:
            return cls(label.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ConfigError(f"unknown preprocessing strategy {label!r} (expected one of: {valid})")


_DROP_HASHTAGS = {Strategy.P_H, Strategy.P_H_M}
_DROP_MENTIONS = {Strategy.P_M, Strategy.P_H_M}
_RUN_FILTERED = {Strategy.P_MRR_HRR, Strategy.P_MRR_HRR_MREP}


@dataclass(frozen=True)
class HandleMap:
    """Case-insensitive lookup from platform handle (without '@') to display name."""

    entries: dict[str, str] = field(default_factory=dict)

    def lookup(self, handle: str) -> str | None:
        return self.entries.get(handle.lstrip("@").lower())

    @classmethod
    def from_pairs(cls, pairs) -> "HandleMap":
        entries = {}
        for handle, name in pairs:
            key = handle.lstrip("@").lower()
            if not key:
                raise InputValidationError("empty handle in handle map")
            entries[key] = name
        return cls(entries)


def load_handle_map(path: str | Path) -> HandleMap:
    """Read a handle map from a UTF-8 TSV file: `handle<TAB>display name`.

    Lines starting with '#' and blank lines are ignored.
    """
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if "\t" not in line:
                raise InputValidationError(f"{path}:{lineno}: expected `handle<TAB>display name`")
            handle, name = line.split("\t", 1)
            if not handle.strip() or not name.strip():
                raise InputValidationError(f"{path}:{lineno}: empty handle or display name")
            pairs.append((handle.strip(), name.strip()))
    return HandleMap.from_pairs(pairs)


def apply(strategy: Strategy, stream: TokenStream, handles: HandleMap | None = None) -> str:
    """Run one cleanup strategy over a token stream and return query-ready text."""
    if strategy is Strategy.NP:
        return stream.source
    if strategy is Strategy.P_MRR_HRR_MREP and handles is None:
        raise ConfigError("strategy p-mrr-hrr+mrep requires a handle map")

    tokens = list(stream.tokens)
    dropped = _run_survivors(tokens) if strategy in _RUN_FILTERED else set()

    pieces: list[tuple[str, bool]] = []  # (text, keep original case)
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if strategy is Strategy.P_EREP:
            end = _match_emoji_marker(tokens, i)
            if end is not None:
                pieces.append((EMOJI_MARKER, True))
                i = end
                continue
        kind = tok.kind
        if kind is TokenKind.WORD:
            pieces.append((tok.text, False))
        elif kind is TokenKind.EMOJI:
            if strategy is Strategy.P_EREP:
                pieces.append((EMOJI_MARKER, True))
        elif kind is TokenKind.HASHTAG:
            if strategy not in _DROP_HASHTAGS and i not in dropped:
                pieces.append((tok.text[1:], False))
        elif kind is TokenKind.MENTION:
            if strategy not in _DROP_MENTIONS and i not in dropped:
                name = handles.lookup(tok.text) if strategy is Strategy.P_MRR_HRR_MREP and handles else None
                pieces.append((name if name is not None else tok.text[1:], False))
        # Punct, Url, and Whitespace contribute nothing; joining pieces with
        # single spaces is what collapsing redundant whitespace means here.
        i += 1

    return " ".join(text if keep_case else text.lower() for text, keep_case in pieces)


def _run_survivors(tokens: list[Token]) -> set[int]:
    """Indices of hashtag/mention tokens to drop: everything after the first
    member of each run (same-kind tokens separated only by whitespace)."""
    dropped: set[int] = set()
    run_kind: TokenKind | None = None
    for i, tok in enumerate(tokens):
        if tok.kind is TokenKind.WHITESPACE:
            continue  # whitespace never breaks a run
        if tok.kind in (TokenKind.HASHTAG, TokenKind.MENTION):
            if tok.kind is run_kind:
                dropped.add(i)
            else:
                run_kind = tok.kind
        else:
            run_kind = None
    return dropped


def _match_emoji_marker(tokens: list[Token], i: int) -> int | None:
    """Recognize a literal ``$EMOJI$`` (Punct '$', Word 'EMOJI', Punct '$'
    with no gaps) so P+ERep output survives re-processing. Returns the index
    past the marker, or None."""
    if i + 2 >= len(tokens):
        return None
    a, b, c = tokens[i], tokens[i + 1], tokens[i + 2]
    if (
        a.kind is TokenKind.PUNCT and a.text == "$"
        and b.kind is TokenKind.WORD and b.text == "EMOJI"
        and c.kind is TokenKind.PUNCT and c.text == "$"
        and a.span[1] == b.span[0] and b.span[1] == c.span[0]
    ):
        return i + 3
    return None


def remove_urls(stream: TokenStream) -> TokenStream:
    """Drop Url tokens and re-lex the remaining text.

    Whitespace runs that become adjacent are merged (first run wins) and
    dangling whitespace at the ends is trimmed, so "see <url> now" comes
    back as "see now".
    """
    parts: list[str] = []
    prev_ws = False
    for tok in stream.tokens:
        if tok.kind is TokenKind.URL:
            continue
        if tok.kind is TokenKind.WHITESPACE:
            if prev_ws:
                continue  # merge: keep the first run's text
            prev_ws = True
        else:
            prev_ws = False
        parts.append(tok.text)
    new_source = "".join(parts).strip()
    return tokenize(new_source)
