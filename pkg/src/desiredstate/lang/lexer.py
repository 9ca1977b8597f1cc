"""Tokenizer for the desired-state description language."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import LexError, Position, error


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "ident"
    INT = "int"
    STRING = "string"
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    EQ = "="
    DOT = "."
    LE = "<="
    GE = ">="
    LT = "<"
    GT = ">"
    EOF = "end of input"


KEYWORDS = frozenset(
    {
        "interface",
        "template",
        "component",
        "type",
        "host",
        "extends",
        "provides",
        "requires",
        "properties",
        "constant",
        "dynamic",
        "implementation",
        "instantiate",
        "with",
        "satisfy",
        "using",
        "bind",
        "initialise",
        "destroy",
        "providedBy",
        "constraintSet",
        "forall",
        "in",
        "deployment",
        "and",
        "or",
        "not",
        "optimise",
    }
)

# American spellings map onto the canonical keyword.
_ALIASES = {"initialize": "initialise", "optimize": "optimise"}

_PUNCT = {
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    ",": TokenKind.COMMA,
    "=": TokenKind.EQ,
    ".": TokenKind.DOT,
    "<": TokenKind.LT,
    ">": TokenKind.GT,
}

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    value: object
    position: Position = field(compare=False)

    def is_keyword(self, word: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.value == word

    def describe(self) -> str:
        if self.kind in (TokenKind.KEYWORD, TokenKind.IDENT):
            return f"{self.kind.value} '{self.value}'"
        if self.kind is TokenKind.INT:
            return f"integer {self.value}"
        if self.kind is TokenKind.STRING:
            return f'string "{self.value}"'
        if self.kind is TokenKind.EOF:
            return "end of input"
        return f"'{self.kind.value}'"

    def __repr__(self) -> str:
        if self.kind in (TokenKind.KEYWORD, TokenKind.IDENT, TokenKind.INT, TokenKind.STRING):
            return f"{self.kind.name.lower()} {self.value!r}"
        return self.kind.name.lower()


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens, dropping whitespace and ``//`` comments.

    The returned list always ends with an EOF token.
    """
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "/" and source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue

        pos = Position(line, col)
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            word = _ALIASES.get(word, word)
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, word, pos))
            col += j - i
            i = j
        elif ch.isdigit():
            j = i + 1
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token(TokenKind.INT, int(source[i:j]), pos))
            col += j - i
            i = j
        elif ch == '"':
            chars = []
            j = i + 1
            while True:
                if j >= n or source[j] == "\n":
                    raise LexError(error(pos, "unterminated string"))
                c = source[j]
                if c == '"':
                    j += 1
                    break
                if c == "\\" and j + 1 < n and source[j + 1] in _ESCAPES:
                    chars.append(_ESCAPES[source[j + 1]])
                    j += 2
                    continue
                chars.append(c)
                j += 1
            tokens.append(Token(TokenKind.STRING, "".join(chars), pos))
            col += j - i
            i = j
        elif ch in "<>" and i + 1 < n and source[i + 1] == "=":
            kind = TokenKind.LE if ch == "<" else TokenKind.GE
            tokens.append(Token(kind, ch + "=", pos))
            i += 2
            col += 2
        elif ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, pos))
            i += 1
            col += 1
        else:
            raise LexError(error(pos, f"illegal character {ch!r}"))

    tokens.append(Token(TokenKind.EOF, None, Position(line, col)))
    return tokens
