"""A small Rust tokenizer that keeps source offsets for every token."""

from __future__ import annotations

import re
from dataclasses import dataclass


class LexError(Exception):
    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class Token:
    kind: str  # ident, lifetime, int, float, str, char, punct
    text: str
    start: int
    end: int

    def is_(self, text: str) -> bool:
        return self.text == text and self.kind in ("punct", "ident")

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}@{self.start})"


KEYWORDS = frozenset(
    """as async await break const continue crate dyn else enum extern false fn for if impl in let
    loop match mod move mut pub ref return self Self static struct super trait true type unsafe use
    where while yield""".split()
)

# longest first; '<' and '>' stay single so generic brackets never fuse
_PUNCT = [
    "...", "..=", "<<=", ">>=",
    "::", "->", "=>", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "^=", "&=", "|=", "..",
    "+", "-", "*", "/", "%", "^", "!", "&", "|", "=", "<", ">", "@", ".", ",", ";", ":", "#", "$", "?",
    "{", "}", "[", "]", "(", ")", "~",
]

_IDENT = re.compile(r"(?:r#)?[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(
    r"""0x[0-9a-fA-F_]+(?:[iu](?:8|16|32|64|128|size))?
      | 0o[0-7_]+(?:[iu](?:8|16|32|64|128|size))?
      | 0b[01_]+(?:[iu](?:8|16|32|64|128|size))?
      | (?P<f>[0-9][0-9_]*(?:\.[0-9][0-9_]*)?(?:[eE][+-]?[0-9_]+)?)(?P<suf>[iuf](?:8|16|32|64|128|size))?""",
    re.X,
)
_CHAR = re.compile(r"'(?:\\(?:x[0-9a-fA-F]{2}|u\{[0-9a-fA-F_]+\}|.)|[^\\'\n])'")
_LIFETIME = re.compile(r"'(?:r#)?[A-Za-z_][A-Za-z0-9_]*")


def _skip_block_comment(src: str, i: int) -> int:
    depth = 0
    n = len(src)
    while i < n:
        if src.startswith("/*", i):
            depth += 1
            i += 2
        elif src.startswith("*/", i):
            depth -= 1
            i += 2
            if depth == 0:
                return i
        else:
            i += 1
    raise LexError("unterminated block comment", i)


def _string_end(src: str, i: int) -> int:
    """``i`` points at the opening quote of a plain string."""
    n = len(src)
    i += 1
    while i < n:
        c = src[i]
        if c == "\\":
            i += 2
        elif c == '"':
            return i + 1
        else:
            i += 1
    raise LexError("unterminated string literal", i)


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(src)
    if src.startswith("#!") and not src.startswith("#!["):
        i = src.find("\n")
        i = n if i < 0 else i
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if src.startswith("//", i):
            j = src.find("\n", i)
            i = n if j < 0 else j
            continue
        if src.startswith("/*", i):
            i = _skip_block_comment(src, i)
            continue
        # raw strings and byte/c-string prefixes
        m = re.match(r'(?:b|c)?r(#*)"', src[i:])
        if m:
            hashes = m.group(1)
            close = '"' + hashes
            j = src.find(close, i + m.end())
            if j < 0:
                raise LexError("unterminated raw string", i)
            toks.append(Token("str", src[i : j + len(close)], i, j + len(close)))
            i = j + len(close)
            continue
        if c in "bc" and i + 1 < n and src[i + 1] == '"':
            j = _string_end(src, i + 1)
            toks.append(Token("str", src[i:j], i, j))
            i = j
            continue
        if c == "b" and i + 1 < n and src[i + 1] == "'":
            m = _CHAR.match(src, i + 1)
            if m:
                toks.append(Token("char", src[i : m.end()], i, m.end()))
                i = m.end()
                continue
        if c == '"':
            j = _string_end(src, i)
            toks.append(Token("str", src[i:j], i, j))
            i = j
            continue
        if c == "'":
            m = _CHAR.match(src, i)
            if m:
                toks.append(Token("char", m.group(0), i, m.end()))
                i = m.end()
                continue
            m = _LIFETIME.match(src, i)
            if m:
                toks.append(Token("lifetime", m.group(0), i, m.end()))
                i = m.end()
                continue
            raise LexError("stray quote", i)
        if c.isdigit():
            m = _NUMBER.match(src, i)
            text = m.group(0)
            # `1..2` and `x.0.1` must not lex as floats
            if "." in text and m.group("f") and not m.group("suf"):
                dot = text.index(".")
                after = src[i + dot + 1 : i + dot + 2]
                if after == "." or after.isalpha() or after == "_" or (toks and toks[-1].text == "."):
                    text = text[:dot]
            if text.endswith(".") and src[i + len(text) : i + len(text) + 1] == ".":
                text = text[:-1]
            kind = "float" if (("." in text or "e" in text.lower() and not text.startswith("0x")) or "f32" in text or "f64" in text) else "int"
            toks.append(Token(kind, text, i, i + len(text)))
            i += len(text)
            continue
        m = _IDENT.match(src, i)
        if m:
            toks.append(Token("ident", m.group(0), i, m.end()))
            i = m.end()
            continue
        for p in _PUNCT:
            if src.startswith(p, i):
                toks.append(Token("punct", p, i, i + len(p)))
                i += len(p)
                break
        else:
            raise LexError(f"unexpected character {c!r}", i)
    return toks


_OPEN = {"(": ")", "[": "]", "{": "}"}


def match_delims(toks: list[Token]) -> dict[int, int]:
    """Map each opening delimiter index to its closing index (and back)."""
    pairs: dict[int, int] = {}
    stack: list[int] = []
    for k, t in enumerate(toks):
        if t.kind != "punct":
            continue
        if t.text in _OPEN:
            stack.append(k)
        elif t.text in (")", "]", "}"):
            if not stack or _OPEN[toks[stack[-1]].text] != t.text:
                raise LexError(f"unbalanced {t.text!r}", t.start)
            o = stack.pop()
            pairs[o] = k
            pairs[k] = o
    if stack:
        raise LexError(f"unclosed {toks[stack[-1]].text!r}", toks[stack[-1]].start)
    return pairs


_NO_SPACE_BEFORE = {")", "]", ",", ";", ".", "?", "::", ":", ">"}
_NO_SPACE_AFTER = {"(", "[", ".", "::", "#", "&", "&&", "<", "!"}


def _space(prev: Token, t: Token) -> bool:
    if t.kind == "punct" and t.text in _NO_SPACE_BEFORE:
        return False
    if prev.kind == "punct" and prev.text in _NO_SPACE_AFTER:
        return False
    if t.text in ("<", "(", "[", "!") and t.kind == "punct":
        if prev.kind == "ident" or prev.text in (">", ")", "]", "::"):
            return False
    return True


def join_tokens(toks: list[Token]) -> str:
    """Render tokens with conventional Rust spacing."""
    out: list[str] = []
    prev: Token | None = None
    for t in toks:
        if prev is not None and _space(prev, t):
            out.append(" ")
        out.append(t.text)
        prev = t
    return "".join(out)
