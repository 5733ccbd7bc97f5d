"""Ordered labeled trees in postorder, and their construction from function tokens."""

from __future__ import annotations

from dataclasses import dataclass

from ..rust.lexer import KEYWORDS, Token

PRIMITIVES = frozenset(
    "i8 i16 i32 i64 i128 isize u8 u16 u32 u64 u128 usize f32 f64 bool char str String".split()
)


@dataclass(frozen=True)
class LabeledTree:
    """Nodes numbered in postorder; ``children[i]`` lists the children of node ``i``."""

    labels: tuple
    children: tuple

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def root(self) -> int:
        return len(self.labels) - 1

    @staticmethod
    def from_nested(t) -> "LabeledTree":
        """Build from ``(label, [subtrees])`` tuples."""
        labels: list = []
        children: list = []

        def go(node) -> int:
            label, kids = node
            ids = [go(k) for k in kids]
            labels.append(label)
            children.append(tuple(ids))
            return len(labels) - 1

        go(t)
        return LabeledTree(tuple(labels), tuple(children))

    def to_nested(self, i: int | None = None):
        i = self.root if i is None else i
        return (self.labels[i], [self.to_nested(c) for c in self.children[i]])

    def depth(self) -> int:
        d = [0] * len(self)
        for i, kids in enumerate(self.children):
            d[i] = 1 + max((d[c] for c in kids), default=0)
        return d[self.root]


def abstract_label(tok: Token, type_names=frozenset()) -> str:
    if tok.kind == "int":
        return "LIT_INT"
    if tok.kind == "float":
        return "LIT_FLOAT"
    if tok.kind == "str":
        return "LIT_STR"
    if tok.kind == "char":
        return "LIT_CHAR"
    if tok.kind == "lifetime":
        return "LT"
    if tok.kind == "ident":
        if tok.text in PRIMITIVES or tok.text in type_names or tok.text[:1].isupper():
            return "TY"
        if tok.text in KEYWORDS:
            return tok.text
        return "ID"
    return tok.text


_GROUP = {"(": "()", "[": "[]", "{": "block"}


def token_forest(toks: list[Token], pairs: dict, lo: int, hi: int, type_names=frozenset()) -> list:
    """Nested nodes for tokens ``lo..hi`` (exclusive); groups become interior nodes."""
    out = []
    i = lo
    while i < hi:
        t = toks[i]
        if t.kind == "punct" and t.text in _GROUP:
            close = pairs[i]
            if t.text == "{":
                out.append(("block", statements(toks, pairs, i + 1, close, type_names)))
            else:
                out.append((_GROUP[t.text], token_forest(toks, pairs, i + 1, close, type_names)))
            i = close + 1
            continue
        out.append((abstract_label(t, type_names), []))
        i += 1
    return out


def statements(toks: list[Token], pairs: dict, lo: int, hi: int, type_names=frozenset()) -> list:
    """Split a block body on top-level `;` into statement nodes."""
    out = []
    start = i = lo
    while i < hi:
        t = toks[i]
        if t.kind == "punct" and t.text in _GROUP:
            i = pairs[i] + 1
            continue
        if t.kind == "punct" and t.text == ";":
            out.append(("stmt", token_forest(toks, pairs, start, i, type_names)))
            start = i + 1
        i += 1
    if start < hi:
        out.append(("expr", token_forest(toks, pairs, start, hi, type_names)))
    return out
