"""Type and lifetime terms shared by every layer of the pipeline."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True, order=True)
class Static:
    def __str__(self) -> str:
        return "'static"


@dataclass(frozen=True, order=True)
class Named:
    """A lifetime variable such as ``'a``; the name ``_`` marks an elided lifetime."""

    name: str

    def __str__(self) -> str:
        return f"'{self.name}"


@dataclass(frozen=True, order=True)
class Fresh:
    """A call-site lifetime that is distinct from every other lifetime."""

    id: int

    def __str__(self) -> str:
        return f"'local{self.id}" if self.id else "'local"


LifetimeTerm = Union[Static, Named, Fresh]

STATIC = Static()
ANON = Named("_")


def is_anon(lt: LifetimeTerm) -> bool:
    return lt == ANON


@dataclass(frozen=True)
class Ground:
    """A type constructor applied to arguments.

    Paths are kept as written (``std::vec::Vec``).  A few builtin shapes use
    reserved paths: ``[]`` for slices, ``[;N]`` for arrays of length N and
    ``*const``/``*mut`` for raw pointers.  Arguments may mix types and
    lifetimes, as in ``Cow<'a, str>``.
    """

    path: str
    args: tuple = ()


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Ref:
    lifetime: LifetimeTerm
    mutable: bool
    inner: "TypeTerm"


@dataclass(frozen=True)
class FnPtr:
    binders: tuple  # tuple[Named, ...]
    params: tuple
    ret: "TypeTerm"


@dataclass(frozen=True)
class Tuple:
    items: tuple = ()


TypeTerm = Union[Ground, Var, Ref, FnPtr, Tuple]

UNIT = Tuple(())


class Wildcard:
    """The ``_`` placeholder allowed in a call site's bound list."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Wildcard"

    def __str__(self) -> str:
        return "_"


WILDCARD = Wildcard()


def is_lifetime(x) -> bool:
    return isinstance(x, (Static, Named, Fresh))


def render_lifetime_arg(lt: LifetimeTerm) -> str:
    """Lifetime as it must appear in a generic argument list."""
    if isinstance(lt, Named):
        return f"'{lt.name}"
    if isinstance(lt, Static):
        return "'static"
    return "'_"


def render(t, show_fresh: bool = False) -> str:
    """Render a term as Rust source.

    Fresh call-site lifetimes are elided unless ``show_fresh`` is set.
    """
    if is_lifetime(t):
        return str(t) if show_fresh and isinstance(t, Fresh) else render_lifetime_arg(t)
    if isinstance(t, Wildcard):
        return "_"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Ground):
        if t.path == "[]":
            return f"[{render(t.args[0], show_fresh)}]"
        if t.path.startswith("[;"):
            return f"[{render(t.args[0], show_fresh)}; {t.path[2:]}]"
        if t.path in ("*const", "*mut"):
            return f"{t.path} {render(t.args[0], show_fresh)}"
        if not t.args:
            return t.path
        return f"{t.path}<{', '.join(render(a, show_fresh) for a in t.args)}>"
    if isinstance(t, Ref):
        lt = t.lifetime
        head = "&"
        if isinstance(lt, (Named, Static)) and not is_anon(lt) or (show_fresh and isinstance(lt, Fresh)):
            head += f"{lt} "
        if t.mutable:
            head += "mut "
        return head + render(t.inner, show_fresh)
    if isinstance(t, Tuple):
        if len(t.items) == 1:
            return f"({render(t.items[0], show_fresh)},)"
        return "(" + ", ".join(render(i, show_fresh) for i in t.items) + ")"
    if isinstance(t, FnPtr):
        head = ""
        if t.binders:
            head = "for<" + ", ".join(str(b) for b in t.binders) + "> "
        s = head + "fn(" + ", ".join(render(p, show_fresh) for p in t.params) + ")"
        if t.ret != UNIT:
            s += " -> " + render(t.ret, show_fresh)
        return s
    raise TypeError(f"not a term: {t!r}")


def walk(t) -> Iterator:
    """Yield every subterm (types and lifetimes) in preorder."""
    yield t
    if isinstance(t, Ground):
        for a in t.args:
            yield from walk(a)
    elif isinstance(t, Ref):
        yield t.lifetime
        yield from walk(t.inner)
    elif isinstance(t, FnPtr):
        for p in t.params:
            yield from walk(p)
        yield from walk(t.ret)
    elif isinstance(t, Tuple):
        for i in t.items:
            yield from walk(i)


def type_vars(t) -> set[str]:
    return {s.name for s in walk(t) if isinstance(s, Var)}


def free_lifetimes(t, bound: frozenset = frozenset()) -> list:
    """Named lifetimes not captured by an enclosing ``for<..>`` binder, in order."""
    out: list = []

    def go(x, bound):
        if isinstance(x, Named):
            if x not in bound and not is_anon(x) and x not in out:
                out.append(x)
        elif isinstance(x, Ground):
            for a in x.args:
                go(a, bound)
        elif isinstance(x, Ref):
            go(x.lifetime, bound)
            go(x.inner, bound)
        elif isinstance(x, FnPtr):
            inner = bound | frozenset(x.binders)
            for p in x.params:
                go(p, inner)
            go(x.ret, inner)
        elif isinstance(x, Tuple):
            for i in x.items:
                go(i, bound)

    go(t, bound)
    return out


def is_ground(t) -> bool:
    """True when the term mentions no type variable."""
    return not type_vars(t)
