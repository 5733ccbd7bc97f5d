"""Recursive-descent parsing of Rust types, generics and bound predicates."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..predicate import All, Any, Atom, Equality, LifetimeEq, Negated, Not, Outlives, TraitBound
from ..terms import ANON, STATIC, WILDCARD, FnPtr, Ground, Named, Ref, Tuple, Var
from .lexer import Token, tokenize


class ParseError(Exception):
    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(message)
        self.message = message
        self.span = span


_TYPE_VAR = re.compile(r"[A-Z][0-9]*$")


class Cursor:
    def __init__(self, toks: list[Token], pos: int = 0, end: int | None = None):
        self.toks = toks
        self.pos = pos
        self.end = len(toks) if end is None else end

    def peek(self, k: int = 0) -> Token | None:
        i = self.pos + k
        return self.toks[i] if i < self.end else None

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.text == text and t.kind in ("punct", "ident")

    def done(self) -> bool:
        return self.pos >= self.end

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self.span_here())
        self.pos += 1
        return t

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t is None or t.text != text:
            found = "end of input" if t is None else repr(t.text)
            raise ParseError(f"expected {text!r}, found {found}", self.span_here())
        self.pos += 1
        return t

    def ident(self) -> Token:
        t = self.peek()
        if t is None or t.kind != "ident":
            found = "end of input" if t is None else repr(t.text)
            raise ParseError(f"expected identifier, found {found}", self.span_here())
        self.pos += 1
        return t

    def span_here(self) -> tuple[int, int]:
        t = self.peek()
        if t is not None:
            return (t.start, t.end)
        if self.end and self.end - 1 < len(self.toks):
            last = self.toks[self.end - 1]
            return (last.end, last.end)
        return (0, 0)

    def eat_close_angle(self) -> bool:
        return self.eat(">")


def lifetime_of(tok: Token):
    name = tok.text[1:]
    if name == "static":
        return STATIC
    return Named(name)


class TypeParser:
    """Parses type syntax into terms.

    ``type_vars`` lists identifiers to treat as variables; when omitted,
    single capital letters (optionally followed by digits) are variables.
    """

    def __init__(self, cur: Cursor, type_vars=None, allow_wildcard: bool = False):
        self.cur = cur
        self.type_vars = None if type_vars is None else set(type_vars)
        self.allow_wildcard = allow_wildcard

    def _is_var(self, name: str) -> bool:
        if self.type_vars is not None:
            return name in self.type_vars
        return bool(_TYPE_VAR.match(name))

    def lifetime_opt(self):
        t = self.cur.peek()
        if t is not None and t.kind == "lifetime":
            self.cur.pos += 1
            return lifetime_of(t)
        return None

    def parse(self):
        cur = self.cur
        t = cur.peek()
        if t is None:
            raise ParseError("expected a type", cur.span_here())
        if t.is_("&") or t.is_("&&"):
            cur.next()
            lt = self.lifetime_opt() or ANON
            mut = cur.eat("mut")
            inner = self.parse()
            if t.text == "&&":
                return Ref(ANON, False, Ref(lt, mut, inner))
            return Ref(lt, mut, inner)
        if t.is_("("):
            cur.next()
            items = []
            trailing = False
            while not cur.at(")"):
                items.append(self.parse())
                trailing = cur.eat(",")
                if not trailing:
                    break
            cur.expect(")")
            if len(items) == 1 and not trailing:
                return items[0]
            return Tuple(tuple(items))
        if t.is_("["):
            cur.next()
            elem = self.parse()
            if cur.eat(";"):
                start = cur.pos
                depth = 0
                while not (depth == 0 and cur.at("]")):
                    tok = cur.next()
                    if tok.text in ("(", "[", "{"):
                        depth += 1
                    elif tok.text in (")", "]", "}"):
                        depth -= 1
                size = " ".join(x.text for x in cur.toks[start : cur.pos])
                cur.expect("]")
                return Ground(f"[;{size}]", (elem,))
            cur.expect("]")
            return Ground("[]", (elem,))
        if t.is_("*"):
            cur.next()
            kind = "*mut" if cur.eat("mut") else ("*const" if cur.eat("const") else None)
            if kind is None:
                raise ParseError("expected `const` or `mut` after `*`", cur.span_here())
            return Ground(kind, (self.parse(),))
        if t.is_("for") or t.is_("fn") or t.is_("unsafe") or t.is_("extern"):
            return self._fn_ptr()
        if t.is_("_"):
            cur.next()
            if not self.allow_wildcard:
                raise ParseError("`_` is only allowed in a call-site bound list", (t.start, t.end))
            return WILDCARD
        if t.is_("dyn") or t.is_("impl"):
            cur.next()
            bounds = self.bounds()
            return Ground(f"{t.text} " + " + ".join(b if isinstance(b, str) else str(b) for b in bounds))
        if t.is_("!"):
            cur.next()
            return Ground("!")
        if t.is_("<"):
            # qualified path `<T as Trait>::Name`
            start = cur.pos
            depth = 0
            while True:
                tok = cur.next()
                if tok.text == "<":
                    depth += 1
                elif tok.text == ">":
                    depth -= 1
                    if depth == 0:
                        break
            while cur.at("::"):
                cur.next()
                cur.ident()
            return Ground("".join(x.text if x.text != "as" else " as " for x in cur.toks[start : cur.pos]))
        return self.path_type()

    def _fn_ptr(self):
        cur = self.cur
        binders: list = []
        if cur.eat("for"):
            cur.expect("<")
            while not cur.at(">"):
                tok = cur.next()
                if tok.kind != "lifetime":
                    raise ParseError("expected a lifetime in `for<..>`", (tok.start, tok.end))
                binders.append(lifetime_of(tok))
                if not cur.eat(","):
                    break
            cur.expect(">")
        cur.eat("unsafe")
        if cur.eat("extern"):
            if cur.peek() is not None and cur.peek().kind == "str":
                cur.next()
        cur.expect("fn")
        cur.expect("(")
        params = []
        while not cur.at(")"):
            # optional `name:` in fn pointer parameters
            if cur.peek() is not None and cur.peek().kind == "ident" and cur.at(":", 1) and not cur.at("::", 1):
                cur.pos += 2
            params.append(self.parse())
            if not cur.eat(","):
                break
        cur.expect(")")
        ret = Tuple(())
        if cur.eat("->"):
            ret = self.parse()
        if len(set(binders)) != len(binders):
            raise ParseError("duplicate lifetime in `for<..>` binder", cur.span_here())
        return FnPtr(tuple(binders), tuple(params), ret)

    def generic_args(self) -> tuple:
        cur = self.cur
        cur.expect("<")
        args = []
        while not cur.at(">"):
            lt = self.lifetime_opt()
            if lt is not None:
                args.append(lt)
            elif cur.peek() is not None and cur.peek().kind == "ident" and cur.at("=", 1):
                # associated type binding `Item = T`
                name = cur.next().text
                cur.next()
                args.append(Ground(f"{name}=", (self.parse(),)))
            else:
                args.append(self.parse())
            if not cur.eat(","):
                break
        cur.expect(">")
        return tuple(args)

    def path_type(self):
        cur = self.cur
        segs = []
        args: tuple = ()
        if cur.eat("::"):
            segs.append("")
        while True:
            tok = cur.ident()
            segs.append(tok.text)
            if cur.at("<") or (cur.at("::") and cur.at("<", 1)):
                cur.eat("::")
                args = self.generic_args()
            if cur.at("::") and cur.peek(1) is not None and cur.peek(1).kind == "ident":
                cur.next()
                continue
            break
        path = "::".join(segs)
        if cur.at("("):
            # Fn(A) -> B sugar in bound position
            start = cur.pos
            close = _matching(cur)
            cur.pos = close + 1
            text = "".join(x.text for x in cur.toks[start : cur.pos])
            if cur.eat("->"):
                ret = self.parse()
                text += " -> " + str(ret)
            return Ground(path + text, ())
        if not args and len(segs) == 1 and self._is_var(path):
            return Var(path)
        return Ground(path, args)

    def trait_path(self) -> str:
        """A trait path with its arguments rendered back to text."""
        from ..terms import render

        t = self.path_type()
        if isinstance(t, Var):
            return t.name
        return render(t)

    def bounds(self) -> list:
        """``A + B + 'a``: trait paths as strings and lifetimes as terms."""
        cur = self.cur
        out: list = []
        while True:
            lt = self.lifetime_opt()
            if lt is not None:
                out.append(lt)
            else:
                paren = cur.eat("(")
                maybe = cur.eat("?")
                if cur.at("for"):
                    start = cur.pos
                    cur.next()
                    cur.expect("<")
                    while not cur.eat(">"):
                        cur.next()
                    prefix = "".join(x.text + (" " if x.text == ">" else "") for x in cur.toks[start : cur.pos])
                    out.append(prefix + self.trait_path())
                else:
                    out.append(("?" if maybe else "") + self.trait_path())
                if paren:
                    cur.expect(")")
            if not cur.eat("+"):
                break
        return out


def _matching(cur: Cursor) -> int:
    depth = 0
    for k in range(cur.pos, cur.end):
        tx = cur.toks[k].text
        if tx in ("(", "[", "{"):
            depth += 1
        elif tx in (")", "]", "}"):
            depth -= 1
            if depth == 0:
                return k
    raise ParseError("unbalanced delimiter", cur.span_here())


def parse_type(src: str | list[Token], type_vars=None, allow_wildcard: bool = False):
    toks = tokenize(src) if isinstance(src, str) else src
    cur = Cursor(toks)
    t = TypeParser(cur, type_vars, allow_wildcard).parse()
    if not cur.done():
        raise ParseError(f"unexpected {cur.peek().text!r} after type", cur.span_here())
    return t


# ---------------------------------------------------------------- generics


@dataclass
class GenericParam:
    name: str
    kind: str  # "type", "lifetime" or "const"
    bounds: list = field(default_factory=list)  # trait paths (str) and lifetimes
    tokens: tuple = ()


def parse_generics(cur: Cursor) -> list[GenericParam]:
    """Parse ``<...>`` at the cursor; returns [] when there is none."""
    out: list[GenericParam] = []
    if not cur.at("<"):
        return out
    cur.next()
    while not cur.at(">"):
        start = cur.pos
        t = cur.peek()
        if t.kind == "lifetime":
            cur.next()
            gp = GenericParam(t.text[1:], "lifetime")
            if cur.eat(":"):
                while True:
                    lt = cur.next()
                    gp.bounds.append(lifetime_of(lt))
                    if not cur.eat("+"):
                        break
        elif t.is_("const"):
            cur.next()
            name = cur.ident().text
            cur.expect(":")
            TypeParser(cur).parse()
            gp = GenericParam(name, "const")
            if cur.eat("="):
                cur.next()
        else:
            name = cur.ident().text
            gp = GenericParam(name, "type")
            if cur.eat(":"):
                if not (cur.at(",") or cur.at(">")):
                    gp.bounds = TypeParser(cur, type_vars=set()).bounds()
            if cur.eat("="):
                TypeParser(cur).parse()
        gp.tokens = tuple(cur.toks[start : cur.pos])
        out.append(gp)
        if not cur.eat(","):
            break
    cur.expect(">")
    return out


# ---------------------------------------------------------------- bound predicates


def _predicate(cur: Cursor, tp: TypeParser):
    t = cur.peek()
    if t is None:
        raise ParseError("expected a predicate", cur.span_here())
    if t.kind == "ident" and t.text in ("any", "all", "not") and cur.at("(", 1):
        cur.pos += 2
        kids = []
        while not cur.at(")"):
            kids.append(_predicate(cur, tp))
            if not cur.eat(","):
                break
        cur.expect(")")
        if t.text == "not":
            if len(kids) != 1:
                raise ParseError("`not` takes exactly one predicate", (t.start, t.end))
            return Not(kids[0])
        if not kids:
            raise ParseError(f"`{t.text}` needs at least one predicate", (t.start, t.end))
        return Any(tuple(kids)) if t.text == "any" else All(tuple(kids))
    return _atom(cur, tp)


def _atom(cur: Cursor, tp: TypeParser):
    t = cur.next()
    if t.kind == "lifetime":
        lhs = lifetime_of(t)
        if cur.eat("="):
            r = cur.next()
            if r.kind != "lifetime":
                raise ParseError("expected a lifetime", (r.start, r.end))
            return Atom(LifetimeEq(lhs, lifetime_of(r)))
        if cur.eat(":"):
            kids = []
            while True:
                r = cur.next()
                if r.kind != "lifetime":
                    raise ParseError("expected a lifetime", (r.start, r.end))
                kids.append(Atom(Outlives(t.text, lifetime_of(r))))
                if not cur.eat("+"):
                    break
            return kids[0] if len(kids) == 1 else All(tuple(kids))
        raise ParseError("unknown lifetime atom form", (t.start, t.end))
    if t.kind != "ident":
        raise ParseError(f"unknown atom form starting with {t.text!r}", (t.start, t.end))
    param = t.text
    if cur.eat("="):
        if cur.at("not") and cur.at("(", 1):
            cur.pos += 2
            rhs = tp.parse()
            cur.expect(")")
            return Atom(Negated(Equality(param, rhs)))
        return Atom(Equality(param, tp.parse()))
    if cur.eat(":"):
        if cur.at("not") and cur.at("(", 1):
            cur.pos += 2
            inner = _bound_atoms(param, tp.bounds())
            cur.expect(")")
            if len(inner) != 1:
                raise ParseError("`not(..)` over mixed trait and lifetime bounds", (t.start, t.end))
            return Atom(Negated(inner[0]))
        atoms = _bound_atoms(param, tp.bounds())
        return Atom(atoms[0]) if len(atoms) == 1 else All(tuple(Atom(a) for a in atoms))
    raise ParseError(f"unknown atom form for `{param}` (expected `=` or `:`)", (t.start, t.end))


def _bound_atoms(param: str, bounds: list) -> list:
    traits = tuple(b for b in bounds if isinstance(b, str))
    atoms: list = []
    if traits:
        atoms.append(TraitBound(param, traits))
    atoms.extend(Outlives(param, b) for b in bounds if not isinstance(b, str))
    return atoms


def parse_predicate(toks: list[Token] | str, type_vars=None):
    """Parse a bound predicate (the inside of ``#[when(...)]``)."""
    if isinstance(toks, str):
        toks = tokenize(toks)
    if not toks:
        raise ParseError("empty predicate", (0, 0))
    cur = Cursor(toks)
    p = _predicate(cur, TypeParser(cur, type_vars))
    if not cur.done():
        raise ParseError(f"unexpected {cur.peek().text!r} after predicate", cur.span_here())
    return p
