"""Tokenizer shared by the language, model and binding parsers."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return "%s:%d:%d" % (self.file, self.line, self.column)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return "%s: %s: %s" % (self.span, self.code, self.message)


@dataclass(frozen=True)
class Token:
    kind: str          # IDENT, NAT, EOF or the punctuation itself
    text: str
    span: SourceSpan


PUNCT = ("->", "=>", "!=", "=", "!", "&", "|", "*", "<", ":", ";", ",", ".",
         "(", ")", "{", "}", "[", "]")


def tokenize(text: str, file: str = "<string>"
             ) -> tuple[list[Token], list[Diagnostic]]:
    """Split ``text`` into tokens. Unknown characters become diagnostics and
    are skipped, so tokenizing never fails."""
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if c in " \t\r":
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start = i
        if c.isascii() and c.isalpha():
            while i < n and text[i].isascii() and (text[i].isalnum()
                                                   or text[i] == "_"):
                i += 1
            kind = "IDENT"
        elif c.isascii() and c.isdigit():
            while i < n and text[i].isascii() and text[i].isdigit():
                i += 1
            kind = "NAT"
        else:
            for p in PUNCT:
                if text.startswith(p, i):
                    i += len(p)
                    kind = p
                    break
            else:
                diags.append(Diagnostic(
                    "BAD_CHARACTER", "unexpected character %r" % c,
                    SourceSpan(file, line, col, 1)))
                i, col = i + 1, col + 1
                continue
        word = text[start:i]
        tokens.append(Token(kind, word, SourceSpan(file, line, col, len(word))))
        col += len(word)
    tokens.append(Token("EOF", "", SourceSpan(file, line, col, 0)))
    return tokens, diags
