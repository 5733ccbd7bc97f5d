"""Item-level structure of a Rust compilation unit.

Only the parts the expander and analyzer need are modelled: attributes,
functions, traits, impl blocks and modules.  Everything else is skipped as an
opaque item.  Positions are token indices into ``Unit.toks``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import Token, match_delims, tokenize
from .parse import Cursor, GenericParam, ParseError, TypeParser, parse_generics


@dataclass
class Attr:
    start: int  # index of '#'
    end: int  # index of closing ']'
    name: str
    args: tuple[int, int] | None  # token range inside the parentheses


@dataclass
class Param:
    pattern: tuple[int, int]
    ty: tuple[int, int] | None  # None for the shorthand self forms
    is_self: bool = False
    self_kind: str = ""  # "&self", "&mut self", "self"


@dataclass
class FnItem:
    name: str
    name_tok: int
    start: int  # first token, including attributes
    sig: tuple[int, int]  # from the first qualifier to the end of the signature
    body: tuple[int, int] | None  # indices of '{' and '}'
    end: int  # last token of the item
    generics: list[GenericParam]
    params: list[Param]
    attrs: list[Attr]


@dataclass
class AssocType:
    name: str
    start: int
    end: int
    attrs: list[Attr]


@dataclass
class TraitItem:
    name: str
    start: int
    end: int
    generics: list[GenericParam]
    body: tuple[int, int]
    fns: list[FnItem]
    others: list  # associated types and consts
    attrs: list[Attr]


@dataclass
class ImplItem:
    start: int
    end: int
    impl_tok: int
    generics: list[GenericParam]
    trait_range: tuple[int, int] | None
    self_range: tuple[int, int]
    where_range: tuple[int, int] | None
    body: tuple[int, int]
    fns: list[FnItem]
    others: list
    attrs: list[Attr]
    negative: bool = False

    @property
    def is_trait_impl(self) -> bool:
        return self.trait_range is not None


@dataclass
class ModItem:
    name: str
    start: int
    end: int
    items: list


@dataclass
class OtherItem:
    kind: str
    start: int
    end: int
    attrs: list[Attr] = field(default_factory=list)


@dataclass
class Unit:
    src: str
    toks: list[Token]
    pairs: dict[int, int]
    items: list

    def text(self, a: int, b: int) -> str:
        """Source text covering tokens ``a..=b``."""
        return self.src[self.toks[a].start : self.toks[b].end]

    def walk(self):
        """Yield (item, enclosing modules) for every item, depth first."""

        def go(items, mods):
            for it in items:
                yield it, mods
                if isinstance(it, ModItem):
                    yield from go(it.items, mods + [it.name])

        yield from go(self.items, [])


_QUALIFIERS = {"pub", "default", "unsafe", "async", "const", "extern", "crate"}


class _ItemParser:
    def __init__(self, unit: Unit):
        self.u = unit
        self.toks = unit.toks
        self.pairs = unit.pairs

    def tok(self, i: int) -> Token | None:
        return self.toks[i] if i < len(self.toks) else None

    def is_(self, i: int, text: str) -> bool:
        t = self.tok(i)
        return t is not None and t.text == text and t.kind in ("ident", "punct")

    def err(self, msg: str, i: int) -> ParseError:
        t = self.tok(min(i, len(self.toks) - 1))
        return ParseError(msg, (t.start, t.end) if t else (0, 0))

    # -- helpers

    def attrs(self, i: int, end: int) -> tuple[list[Attr], int]:
        out = []
        while i < end and self.is_(i, "#"):
            j = i + 1
            if self.is_(j, "!"):
                j += 1
            if not self.is_(j, "["):
                raise self.err("expected `[` after `#`", j)
            close = self.pairs[j]
            name_parts = []
            k = j + 1
            while k < close and (self.toks[k].kind == "ident" or self.is_(k, "::")):
                name_parts.append(self.toks[k].text)
                k += 1
            args = None
            if k < close and self.is_(k, "("):
                args = (k + 1, self.pairs[k] - 1)
            out.append(Attr(i, close, "".join(name_parts), args))
            i = close + 1
        return out, i

    def skip_vis(self, i: int) -> int:
        if self.is_(i, "pub"):
            i += 1
            if self.is_(i, "("):
                i = self.pairs[i] + 1
        return i

    def skip_to_item_end(self, i: int, end: int) -> int:
        """Index of the last token of an opaque item starting at ``i``."""
        while i < end:
            t = self.toks[i]
            if t.kind == "punct" and t.text in ("(", "["):
                i = self.pairs[i] + 1
                continue
            if t.kind == "punct" and t.text == "{":
                close = self.pairs[i]
                return close + 1 if self.is_(close + 1, ";") else close
            if t.kind == "punct" and t.text == ";":
                return i
            i += 1
        return end - 1

    def find_top(self, i: int, end: int, texts: set) -> int:
        """First index in [i, end) of a token in ``texts`` outside any delimiter group."""
        while i < end:
            t = self.toks[i]
            if t.kind == "punct" and t.text in texts:
                return i
            if t.kind == "ident" and t.text in texts:
                return i
            if t.kind == "punct" and t.text in ("(", "["):
                i = self.pairs[i] + 1
                continue
            i += 1
        return -1

    # -- items

    def items(self, i: int, end: int, assoc: bool = False) -> list:
        out = []
        while i < end:
            if self.is_(i, ";"):
                i += 1
                continue
            start = i
            attrs, i = self.attrs(i, end)
            if attrs and i >= end:
                break
            j = self.skip_vis(i)
            k = j
            while self.tok(k) is not None and self.toks[k].kind == "ident" and self.toks[k].text in _QUALIFIERS:
                if self.toks[k].text == "const" and not (self.is_(k + 1, "fn") or self.is_(k + 1, "unsafe") or self.is_(k + 1, "async") or self.is_(k + 1, "extern")):
                    break
                if self.toks[k].text == "unsafe" and self.is_(k + 1, "{"):
                    break
                k += 1
                if self.tok(k) is not None and self.toks[k].kind == "str":
                    k += 1
            t = self.tok(k)
            if t is None:
                break
            if t.text == "fn" and t.kind == "ident":
                it = self.fn_item(start, j, k, attrs)
            elif t.text == "trait" or (t.text == "auto" and self.is_(k + 1, "trait")):
                it = self.trait_item(start, k if t.text == "trait" else k + 1, attrs)
            elif t.text == "impl":
                it = self.impl_item(start, k, attrs)
            elif t.text == "mod" and not assoc:
                name = self.toks[k + 1].text
                if self.is_(k + 2, "{"):
                    close = self.pairs[k + 2]
                    it = ModItem(name, start, close, self.items(k + 3, close))
                else:
                    it = OtherItem("mod", start, k + 2, attrs)
            elif t.text == "type" and assoc:
                e = self.skip_to_item_end(k, end)
                it = AssocType(self.toks[k + 1].text, start, e, attrs)
            else:
                kind = t.text if t.kind == "ident" else "other"
                if t.kind == "ident" and self.is_(k + 1, "!"):
                    kind = "macro"
                it = OtherItem(kind, start, self.skip_to_item_end(k, end), attrs)
            out.append(it)
            i = it.end + 1
        return out

    def fn_item(self, start: int, sig_start: int, fn_tok: int, attrs) -> FnItem:
        name_tok = fn_tok + 1
        name = self.toks[name_tok].text
        cur = Cursor(self.toks, name_tok + 1)
        generics = parse_generics(cur)
        i = cur.pos
        if not self.is_(i, "("):
            raise self.err("expected `(` in function signature", i)
        params = self.params(i + 1, self.pairs[i])
        i = self.pairs[i] + 1
        # return type and where clause run to the body or ';'
        while True:
            t = self.tok(i)
            if t is None:
                raise self.err("unterminated function signature", i)
            if t.kind == "punct" and t.text in ("{", ";"):
                break
            if t.kind == "punct" and t.text in ("(", "["):
                i = self.pairs[i] + 1
                continue
            i += 1
        if self.toks[i].text == "{":
            close = self.pairs[i]
            return FnItem(name, name_tok, start, (sig_start, i - 1), (i, close), close, generics, params, attrs)
        return FnItem(name, name_tok, start, (sig_start, i - 1), None, i, generics, params, attrs)

    def params(self, i: int, end: int) -> list[Param]:
        out = []
        while i < end:
            # split on commas outside of angle brackets and groups
            j, angle = i, 0
            colon = -1
            while j < end:
                t = self.toks[j]
                if t.kind == "punct":
                    if t.text in ("(", "["):
                        j = self.pairs[j] + 1
                        continue
                    if t.text == "<":
                        angle += 1
                    elif t.text == ">":
                        angle -= 1
                    elif t.text == "," and angle == 0:
                        break
                    elif t.text == ":" and angle == 0 and colon < 0:
                        colon = j
                j += 1
            _, a = self.attrs(i, j)
            texts = [t.text for t in self.toks[a:j]]
            if colon < 0:
                if texts and texts[-1] == "self":
                    sk = "&mut self" if "&" in texts and "mut" in texts else ("&self" if "&" in texts else "self")
                    out.append(Param((a, j - 1), None, True, sk))
                else:
                    out.append(Param((a, j - 1), None))
            else:
                is_self = texts[0] == "self" or texts[:2] == ["mut", "self"]
                out.append(Param((a, colon - 1), (colon + 1, j - 1), is_self, "self" if is_self else ""))
            i = j + 1
        return out

    def trait_item(self, start: int, k: int, attrs) -> TraitItem:
        name = self.toks[k + 1].text
        cur = Cursor(self.toks, k + 2)
        generics = parse_generics(cur)
        i = cur.pos
        while not self.is_(i, "{"):
            if self.tok(i) is None:
                raise self.err("expected trait body", i)
            i += 1
        close = self.pairs[i]
        body = self.items(i + 1, close, assoc=True)
        fns = [b for b in body if isinstance(b, FnItem)]
        others = [b for b in body if not isinstance(b, FnItem)]
        return TraitItem(name, start, close, generics, (i, close), fns, others, attrs)

    def impl_item(self, start: int, k: int, attrs) -> ImplItem:
        cur = Cursor(self.toks, k + 1)
        generics = parse_generics(cur) if self.is_(k + 1, "<") else []
        i = cur.pos
        body = i
        while not self.is_(body, "{"):
            if self.tok(body) is None:
                raise self.err("expected impl body", body)
            body += 1
        close = self.pairs[body]
        where = self.find_top(i, body, {"where"})
        head_end = where if where >= 0 else body
        negative = self.is_(i, "!")
        if negative:
            i += 1
        # locate a top-level `for` that is not an HRTB binder
        split, angle = -1, 0
        for j in range(i, head_end):
            t = self.toks[j]
            if t.text == "<":
                angle += 1
            elif t.text == ">":
                angle -= 1
            elif t.text == "for" and t.kind == "ident" and angle == 0 and not self.is_(j + 1, "<"):
                split = j
                break
        if split >= 0:
            trait_range = (i, split - 1)
            self_range = (split + 1, head_end - 1)
        else:
            trait_range = None
            self_range = (i, head_end - 1)
        where_range = (where, body - 1) if where >= 0 else None
        items = self.items(body + 1, close, assoc=True)
        fns = [b for b in items if isinstance(b, FnItem)]
        others = [b for b in items if not isinstance(b, FnItem)]
        return ImplItem(start, close, k, generics, trait_range, self_range, where_range, (body, close), fns, others, attrs, negative)


def parse_unit(src: str) -> Unit:
    toks = tokenize(src)
    pairs = match_delims(toks)
    unit = Unit(src, toks, pairs, [])
    unit.items = _ItemParser(unit).items(0, len(toks))
    return unit


def impl_types(unit: Unit, impl: ImplItem):
    """Parse the trait path and self type of an impl header into terms."""
    names = {g.name for g in impl.generics if g.kind == "type"}
    trait = None
    if impl.trait_range is not None:
        a, b = impl.trait_range
        cur = Cursor(unit.toks, a, b + 1)
        trait = TypeParser(cur, names).path_type()
    a, b = impl.self_range
    cur = Cursor(unit.toks, a, b + 1)
    self_ty = TypeParser(cur, names).parse()
    return trait, self_ty
