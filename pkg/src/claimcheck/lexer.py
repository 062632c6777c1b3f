"""Lossless tokenizer for raw social-media text.

Splits a post into Word / Hashtag / Mention / Emoji / Url / Punct /
Whitespace tokens whose concatenation reproduces the input exactly, so
every downstream cleanup strategy can decide per token class what to keep.

Grammar (platform conventions, fixed here because posts never declare them):

* Mention: ``@`` followed by 1-15 characters from ``[A-Za-z0-9_]``.
* Hashtag: ``#`` followed by one or more Unicode letters/digits/underscores.
* Url: ``http(s)://`` or ``www.`` followed by RFC-3986 characters; trailing
  sentence punctuation (``.,;:!?``) is not part of the URL.
* Emoji: one extended grapheme cluster containing an emoji-presentation or
  pictographic codepoint (so skin tones and ZWJ families stay one token);
  consecutive emoji are separate tokens.
* A ``#`` or ``@`` not opening a valid identifier is plain Punct.
* Word: maximal run of Unicode letters, digits, marks, or underscores.
* Punct: any other single grapheme (punctuation, symbols, controls).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import regex

from .errors import InputValidationError, StructuralError

MAX_INPUT_CHARS = 10_000


class TokenKind(enum.Enum):
    WORD = "word"
    HASHTAG = "hashtag"
    MENTION = "mention"
    EMOJI = "emoji"
    URL = "url"
    PUNCT = "punct"
    WHITESPACE = "whitespace"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: tuple[int, int]  # [start, end) offsets into the source


@dataclass(frozen=True)
class TokenStream:
    source: str
    tokens: tuple[Token, ...]

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self):
        return len(self.tokens)


_WHITESPACE = regex.compile(r"\s+")
_MENTION = regex.compile(r"@[A-Za-z0-9_]{1,15}")
_HASHTAG = regex.compile(r"#[\p{L}\p{M}\p{N}_]+")
# RFC 3986 unreserved + reserved + percent sign.
_URL = regex.compile(r"(?:https?://|www\.)[A-Za-z0-9\-._~:/?#\[\]@!$&'()*+,;=%]+", regex.IGNORECASE)
_URL_TRAILING = ".,;:!?"
_WORD = regex.compile(r"[\p{L}\p{M}\p{N}_]+")
_GRAPHEME = regex.compile(r"\X")
# Plain digits and '#' carry the bare Emoji property; presentation/pictographic
# classes and regional-indicator pairs are what users mean by "emoji".
_EMOJI_MARK = regex.compile(r"[\p{Emoji_Presentation}\p{Extended_Pictographic}\p{Regional_Indicator}]")

_SURROGATES = regex.compile(r"[\ud800-\udfff]")


def tokenize(text: str) -> TokenStream:
    """Lex `text` into a TokenStream whose tokens tile the input exactly.

    Raises InputValidationError for non-str input, strings containing
    unpaired surrogates, or input longer than MAX_INPUT_CHARS.
    """
    if not isinstance(text, str):
        raise InputValidationError(f"expected str, got {type(text).__name__}")
    if len(text) > MAX_INPUT_CHARS:
        raise InputValidationError(
            f"input of {len(text)} characters exceeds the {MAX_INPUT_CHARS}-character limit"
        )
    if _SURROGATES.search(text):
        raise InputValidationError("input contains unpaired surrogate codepoints")

    tokens: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _WHITESPACE.match(text, pos)
        if m:
            tokens.append(Token(TokenKind.WHITESPACE, m.group(), (pos, m.end())))
            pos = m.end()
            continue

        m = _URL.match(text, pos)
        if m:
            url_text = _trim_url(m.group())
            if url_text is not None:
                end = pos + len(url_text)
                tokens.append(Token(TokenKind.URL, url_text, (pos, end)))
                pos = end
                continue

        ch = text[pos]
        if ch == "#":
            m = _HASHTAG.match(text, pos)
            if m:
                tokens.append(Token(TokenKind.HASHTAG, m.group(), (pos, m.end())))
                pos = m.end()
                continue
        elif ch == "@":
            m = _MENTION.match(text, pos)
            if m:
                tokens.append(Token(TokenKind.MENTION, m.group(), (pos, m.end())))
                pos = m.end()
                continue

        cluster = _GRAPHEME.match(text, pos).group()
        if _EMOJI_MARK.search(cluster):
            tokens.append(Token(TokenKind.EMOJI, cluster, (pos, pos + len(cluster))))
            pos += len(cluster)
            continue

        m = _WORD.match(text, pos)
        if m:
            tokens.append(Token(TokenKind.WORD, m.group(), (pos, m.end())))
            pos = m.end()
            continue

        tokens.append(Token(TokenKind.PUNCT, cluster, (pos, pos + len(cluster))))
        pos += len(cluster)

    return TokenStream(source=text, tokens=tuple(tokens))


def _trim_url(matched: str) -> str | None:
    """Drop sentence punctuation glued to a URL; None if nothing real remains."""
    trimmed = matched.rstrip(_URL_TRAILING)
    lower = trimmed.lower()
    for prefix in ("https://", "http://", "www."):
        if lower.startswith(prefix):
            return trimmed if len(trimmed) > len(prefix) else None
    return None


def detokenize(stream: TokenStream) -> str:
    """Reassemble the original text, verifying the stream is well formed."""
    pos = 0
    parts = []
    for tok in stream.tokens:
        start, end = tok.span
        if start != pos:
            raise StructuralError(f"token span gap/overlap at offset {pos} (token starts at {start})")
        if end - start != len(tok.text) or start >= end:
            raise StructuralError(f"token span {tok.span} inconsistent with text {tok.text!r}")
        parts.append(tok.text)
        pos = end
    if pos != len(stream.source):
        raise StructuralError(f"tokens cover [0, {pos}) but source has length {len(stream.source)}")
    out = "".join(parts)
    if out != stream.source:
        raise StructuralError("token texts do not reproduce the source")
    return out
