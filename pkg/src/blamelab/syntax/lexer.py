"""Tokenizer for `.blame` sources."""
from __future__ import annotations

from dataclasses import dataclass

from .ast import Span

KEYWORDS = frozenset({"let", "in", "fun", "if", "then", "else", "true", "false", "null"})

# Multi-character operators first so maximal munch wins.
_OPERATORS = (
    "@|", "@&", "->", "=>", "++", "==", "<=", ">=", "&&", "||",
    "=", "|", "+", "-", "*", "/", "<", ">", ".", ",", "(", ")", "[", "]", "{", "}",
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


class LexError(Exception):
    def __init__(self, span: Span, message: str):
        super().__init__(f"{span.location()}: {message}")
        self.span = span
        self.message = message


@dataclass(frozen=True)
class Token:
    kind: str        # "num" | "str" | "ident" | keyword | operator | "eof"
    text: str
    span: Span
    value: float | str | None = None


class _Scanner:
    def __init__(self, source: str, file: str):
        self.src = source
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int) -> None:
        for _ in range(n):
            if self.pos < len(self.src) and self.src[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _span_from(self, start: tuple[int, int, int]) -> Span:
        s_pos, s_line, s_col = start
        return Span(self.file, s_pos, self.pos, s_line, s_col, self.line, self.col)

    def _mark(self) -> tuple[int, int, int]:
        return (self.pos, self.line, self.col)

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        src = self.src
        while True:
            while self.pos < len(src) and src[self.pos] in " \t\r\n":
                self._advance(1)
            if self.pos < len(src) and src[self.pos] == "#":
                while self.pos < len(src) and src[self.pos] != "\n":
                    self._advance(1)
                continue
            if self.pos >= len(src):
                break
            start = self._mark()
            ch = src[self.pos]
            if ch.isdigit():
                out.append(self._number(start))
            elif ch.isalpha() or ch == "_":
                self._advance(1)
                while self.pos < len(src) and (src[self.pos].isalnum() or src[self.pos] == "_"):
                    self._advance(1)
                text = src[start[0]:self.pos]
                kind = text if text in KEYWORDS else "ident"
                out.append(Token(kind, text, self._span_from(start)))
            elif ch == '"':
                out.append(self._string(start))
            else:
                for op in _OPERATORS:
                    if src.startswith(op, self.pos):
                        self._advance(len(op))
                        out.append(Token(op, op, self._span_from(start)))
                        break
                else:
                    self._advance(1)
                    raise LexError(self._span_from(start), f"illegal character {ch!r}")
        eof_span = Span(self.file, self.pos, self.pos, self.line, self.col, self.line, self.col)
        out.append(Token("eof", "", eof_span))
        return out

    def _number(self, start: tuple[int, int, int]) -> Token:
        src = self.src
        while self.pos < len(src) and src[self.pos].isdigit():
            self._advance(1)
        if (self.pos + 1 < len(src) and src[self.pos] == "."
                and src[self.pos + 1].isdigit()):
            self._advance(1)
            while self.pos < len(src) and src[self.pos].isdigit():
                self._advance(1)
        text = src[start[0]:self.pos]
        return Token("num", text, self._span_from(start), value=float(text))

    def _string(self, start: tuple[int, int, int]) -> Token:
        src = self.src
        self._advance(1)
        chars: list[str] = []
        while True:
            if self.pos >= len(src) or src[self.pos] == "\n":
                raise LexError(self._span_from(start), "unterminated string")
            ch = src[self.pos]
            if ch == '"':
                self._advance(1)
                break
            if ch == "\\":
                self._advance(1)
                if self.pos >= len(src):
                    raise LexError(self._span_from(start), "unterminated string")
                esc = src[self.pos]
                if esc not in _ESCAPES:
                    raise LexError(self._span_from(start), f"unknown escape \\{esc}")
                chars.append(_ESCAPES[esc])
                self._advance(1)
                continue
            chars.append(ch)
            self._advance(1)
        text = src[start[0]:self.pos]
        return Token("str", text, self._span_from(start), value="".join(chars))


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    """Tokenize source text; the final token is always "eof"."""
    return _Scanner(source, file).tokens()
