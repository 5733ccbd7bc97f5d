"""Substitutions and first-order unification over type and lifetime terms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .terms import (
    FnPtr,
    Fresh,
    Ground,
    Named,
    Ref,
    Static,
    Tuple,
    Var,
    free_lifetimes,
    is_anon,
    is_lifetime,
    render,
    walk,
)


@dataclass(frozen=True)
class Substitution:
    types: dict = field(default_factory=dict)
    lifetimes: dict = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not self.types and not self.lifetimes

    def __str__(self) -> str:
        parts = [f"{k} := {render(v, show_fresh=True)}" for k, v in sorted(self.types.items())]
        parts += [
            f"{k} := {v}" for k, v in sorted(self.lifetimes.items(), key=lambda kv: str(kv[0]))
        ]
        return "[" + ", ".join(parts) + "]"

    def to_json(self) -> dict:
        return {
            "types": {k: render(v, show_fresh=True) for k, v in sorted(self.types.items())},
            "lifetimes": {str(k): str(v) for k, v in sorted(self.lifetimes.items(), key=lambda kv: str(kv[0]))},
        }


EMPTY = Substitution()


def _rename_lifetimes(t, mapping: dict):
    if not mapping:
        return t
    return _apply(t, {}, mapping)


def _apply(t, types: dict, lts: dict, bound: frozenset = frozenset()):
    if isinstance(t, Var):
        return types.get(t.name, t)
    if isinstance(t, Named):
        if t in bound:
            return t
        return lts.get(t, t)
    if isinstance(t, (Static, Fresh)):
        return t
    if isinstance(t, Ground):
        if not t.args:
            return t
        return Ground(t.path, tuple(_apply(a, types, lts, bound) for a in t.args))
    if isinstance(t, Ref):
        return Ref(_apply(t.lifetime, types, lts, bound), t.mutable, _apply(t.inner, types, lts, bound))
    if isinstance(t, Tuple):
        return Tuple(tuple(_apply(i, types, lts, bound) for i in t.items))
    if isinstance(t, FnPtr):
        binders = t.binders
        # rename a binder if a substituted image would be captured by it
        images = set()
        for s in walk(t):
            if isinstance(s, Var) and s.name in types:
                images.update(free_lifetimes(types[s.name]))
            elif isinstance(s, Named) and s not in binders and s in lts and isinstance(lts[s], Named):
                images.add(lts[s])
        rename = {}
        taken = set(images) | set(binders)
        for b in binders:
            if b in images:
                for i in itertools.count(1):
                    cand = Named(f"{b.name}{i}")
                    if cand not in taken:
                        break
                rename[b] = cand
                taken.add(cand)
        if rename:
            params = tuple(_rename_lifetimes(p, rename) for p in t.params)
            ret = _rename_lifetimes(t.ret, rename)
            binders = tuple(rename.get(b, b) for b in binders)
            t = FnPtr(binders, params, ret)
        inner = bound | frozenset(binders)
        return FnPtr(
            binders,
            tuple(_apply(p, types, lts, inner) for p in t.params),
            _apply(t.ret, types, lts, inner),
        )
    raise TypeError(f"not a term: {t!r}")


def apply_substitution(substitution: Substitution, t):
    """Replace variables and lifetimes mapped by ``substitution``; binder-bound lifetimes are left alone."""
    return _apply(t, substitution.types, substitution.lifetimes)


class Unifier:
    """Incremental most-general unifier.

    Names in ``rigid`` (type variables) or ``rigid_lifetimes`` behave as
    constants.  ``Static`` and ``Fresh`` lifetimes are always constants and the
    elided lifetime ``'_`` unifies with anything without binding.
    """

    def __init__(self, rigid=frozenset(), rigid_lifetimes=frozenset()):
        self.types: dict = {}
        self.lts: dict = {}
        self.rigid = set(rigid)
        self.rigid_lts = set(rigid_lifetimes)
        self._locals = itertools.count()

    def copy(self) -> "Unifier":
        u = Unifier(self.rigid, self.rigid_lts)
        u.types = dict(self.types)
        u.lts = dict(self.lts)
        u._locals = self._locals
        return u

    def _walk_lt(self, lt):
        while isinstance(lt, Named) and lt in self.lts:
            lt = self.lts[lt]
        return lt

    def _walk(self, t):
        while isinstance(t, Var) and t.name in self.types:
            t = self.types[t.name]
        return t

    def _lt_flexible(self, lt) -> bool:
        return isinstance(lt, Named) and not is_anon(lt) and lt not in self.rigid_lts and not lt.name.startswith("#")

    def unify_lt(self, a, b) -> bool:
        a, b = self._walk_lt(a), self._walk_lt(b)
        if is_anon(a) or is_anon(b) or a == b:
            return True
        if self._lt_flexible(a):
            self.lts[a] = b
            return True
        if self._lt_flexible(b):
            self.lts[b] = a
            return True
        return False

    def _occurs(self, name: str, t) -> bool:
        t = self._walk(t)
        if isinstance(t, Var):
            return t.name == name
        if isinstance(t, Ground):
            return any(not is_lifetime(a) and self._occurs(name, a) for a in t.args)
        if isinstance(t, Ref):
            return self._occurs(name, t.inner)
        if isinstance(t, Tuple):
            return any(self._occurs(name, i) for i in t.items)
        if isinstance(t, FnPtr):
            return any(self._occurs(name, p) for p in t.params) or self._occurs(name, t.ret)
        return False

    def _bind(self, name: str, t) -> bool:
        if self._occurs(name, t):
            return False
        self.types[name] = t
        return True

    def unify(self, a, b) -> bool:
        if is_lifetime(a) or is_lifetime(b):
            return is_lifetime(a) and is_lifetime(b) and self.unify_lt(a, b)
        a, b = self._walk(a), self._walk(b)
        if a == b:
            return True
        if isinstance(a, Var) and a.name not in self.rigid:
            return self._bind(a.name, b)
        if isinstance(b, Var) and b.name not in self.rigid:
            return self._bind(b.name, a)
        if isinstance(a, Ground) and isinstance(b, Ground):
            if a.path != b.path or len(a.args) != len(b.args):
                return False
            return all(self.unify(x, y) for x, y in zip(a.args, b.args))
        if isinstance(a, Ref) and isinstance(b, Ref):
            return a.mutable == b.mutable and self.unify_lt(a.lifetime, b.lifetime) and self.unify(a.inner, b.inner)
        if isinstance(a, Tuple) and isinstance(b, Tuple):
            return len(a.items) == len(b.items) and all(self.unify(x, y) for x, y in zip(a.items, b.items))
        if isinstance(a, FnPtr) and isinstance(b, FnPtr):
            return self._unify_fn(a, b)
        return False

    def _unify_fn(self, a: FnPtr, b: FnPtr) -> bool:
        # Binder lists must be alpha-equivalent: rename both to shared rigid locals.
        if len(a.binders) != len(b.binders) or len(a.params) != len(b.params):
            return False
        locals_ = [Named(f"#{next(self._locals)}") for _ in a.binders]
        ra = dict(zip(a.binders, locals_))
        rb = dict(zip(b.binders, locals_))
        pa = [_rename_lifetimes(p, ra) for p in a.params] + [_rename_lifetimes(a.ret, ra)]
        pb = [_rename_lifetimes(p, rb) for p in b.params] + [_rename_lifetimes(b.ret, rb)]
        if not all(self.unify(x, y) for x, y in zip(pa, pb)):
            return False
        # a binder-local lifetime must not escape into an outer binding
        escaped = set(locals_)
        for v in list(self.types):
            if escaped & set(free_lifetimes(self.resolve(Var(v)))):
                return False
        for k in list(self.lts):
            if self._walk_lt(k) in escaped:
                return False
        return True

    def resolve_lt(self, lt):
        return self._walk_lt(lt)

    def resolve(self, t, _depth: int = 0):
        if _depth > 200:
            raise RecursionError("cyclic substitution")
        if is_lifetime(t):
            return self._walk_lt(t)
        t = self._walk(t)
        if isinstance(t, Var):
            return t
        if isinstance(t, Ground):
            if not t.args:
                return t
            return Ground(t.path, tuple(self.resolve(x, _depth + 1) for x in t.args))
        if isinstance(t, Ref):
            return Ref(self._walk_lt(t.lifetime), t.mutable, self.resolve(t.inner, _depth + 1))
        if isinstance(t, Tuple):
            return Tuple(tuple(self.resolve(x, _depth + 1) for x in t.items))
        if isinstance(t, FnPtr):
            inner = Unifier(self.rigid, self.rigid_lts)
            inner.types = self.types
            inner.lts = {k: v for k, v in self.lts.items() if k not in t.binders}
            return FnPtr(
                t.binders,
                tuple(inner.resolve(p, _depth + 1) for p in t.params),
                inner.resolve(t.ret, _depth + 1),
            )
        return t

    def substitution(self, exclude=frozenset(), keep_types=None, keep_lifetimes=None) -> Substitution:
        """Idempotent view of the current bindings."""
        types = {}
        for v in self.types:
            if v in exclude or (keep_types is not None and v not in keep_types):
                continue
            types[v] = self.resolve(Var(v))
        lts = {}
        for k in self.lts:
            if k.name.startswith("#") or (keep_lifetimes is not None and k not in keep_lifetimes):
                continue
            r = self._walk_lt(k)
            if r != k:
                lts[k] = r
        return Substitution(types, lts)


def unify_terms(a, b, rigid=frozenset()) -> Substitution | None:
    u = Unifier(rigid)
    if not u.unify(a, b):
        return None
    return u.substitution()
