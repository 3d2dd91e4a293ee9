"""Shared tokenizer for the schema DDL, the rule language and the REPL commands.

All three front-ends use the same lexical conventions: Unicode identifiers
(letters, digits, underscore), unsigned decimal numbers, `--` line comments
and case-insensitive keywords. Keywords are not reserved at the lexer level;
parsers match word tokens contextually.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EngineError

WORD = "word"
NUMBER = "number"
PUNCT = "punct"
END = "end"

_WORD_RE = re.compile(r"[^\W\d]\w*", re.UNICODE)
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def folded(self) -> str:
        return self.text.casefold()


def tokenize(source: str, puncts: tuple[str, ...], join_hyphen: bool = False) -> list[Token]:
    """Tokenize `source`, recognizing the given punctuation strings.

    `join_hyphen` folds `WORD-WORD` (no spaces) into a single word token, for
    the hyphenated event keywords of the rule language.
    """
    tokens: list[Token] = []
    by_length = sorted(puncts, key=len, reverse=True)
    i, line, line_start = 0, 1, 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            i += 1
            line_start = i
            continue
        if ch.isspace():
            i += 1
            continue
        if source.startswith("--", i):
            end = source.find("\n", i)
            i = n if end < 0 else end
            continue
        col = i - line_start + 1
        m = _NUMBER_RE.match(source, i)
        if m:
            tokens.append(Token(NUMBER, m.group(), line, col))
            i = m.end()
            continue
        m = _WORD_RE.match(source, i)
        if m:
            text = m.group()
            i = m.end()
            while join_hyphen and i < n and source[i] == "-":
                tail = _WORD_RE.match(source, i + 1)
                if not tail:
                    break
                text += "-" + tail.group()
                i = tail.end()
            tokens.append(Token(WORD, text, line, col))
            continue
        for p in by_length:
            if source.startswith(p, i):
                tokens.append(Token(PUNCT, p, line, col))
                i += len(p)
                break
        else:
            raise EngineError("lex-error", f"unexpected character {ch!r}", (line, col))
    tokens.append(Token(END, "", line, n - line_start + 1))
    return tokens


class TokenStream:
    """Cursor over a token list with the usual peek/accept/expect helpers."""

    def __init__(self, tokens: list[Token]):
        self._tokens = tokens
        self._pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self._tokens[min(self._pos + ahead, len(self._tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != END:
            self._pos += 1
        return tok

    def at_end(self) -> bool:
        return self.peek().kind == END

    def accept_word(self, *keywords: str) -> Token | None:
        tok = self.peek()
        if tok.kind == WORD and tok.folded in {k.casefold() for k in keywords}:
            return self.next()
        return None

    def accept_punct(self, text: str) -> Token | None:
        tok = self.peek()
        if tok.kind == PUNCT and tok.text == text:
            return self.next()
        return None

    def expect_word(self, *keywords: str) -> Token:
        tok = self.accept_word(*keywords)
        if tok is None:
            return self.fail(" or ".join(keywords))
        return tok

    def expect_punct(self, text: str) -> Token:
        tok = self.accept_punct(text)
        if tok is None:
            return self.fail(f"{text!r}")
        return tok

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != WORD:
            return self.fail("an identifier")
        return self.next()

    def expect_number(self) -> Token:
        tok = self.peek()
        if tok.kind != NUMBER:
            return self.fail("a number")
        return self.next()

    def fail(self, expected: str) -> Token:
        tok = self.peek()
        got = repr(tok.text) if tok.kind != END else "end of input"
        raise EngineError("syntax-error", f"expected {expected}, got {got}", (tok.line, tok.col))
