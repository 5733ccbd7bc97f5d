"""Specialization-bound predicates: atoms, DNF canonicalization, unification and ordering."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .subst import Substitution, Unifier
from .terms import Named, Ref, Var, free_lifetimes, is_anon, is_ground, render


# ---------------------------------------------------------------- atoms


@dataclass(frozen=True)
class Equality:
    param: str
    rhs: object

    def __str__(self) -> str:
        return f"{self.param} = {render(self.rhs)}"


@dataclass(frozen=True)
class TraitBound:
    param: str
    traits: tuple  # sorted, deduplicated trait paths

    def __post_init__(self):
        if not self.traits:
            raise ValueError("trait bound needs at least one trait")
        object.__setattr__(self, "traits", tuple(sorted(set(self.traits))))

    def __str__(self) -> str:
        return f"{self.param}: {' + '.join(self.traits)}"


@dataclass(frozen=True)
class Outlives:
    """``param: 'lt``.  ``param`` is a type parameter or a lifetime written as ``'x``."""

    param: str
    lifetime: object

    def __str__(self) -> str:
        return f"{self.param}: {self.lifetime}"


@dataclass(frozen=True)
class LifetimeEq:
    l: object
    r: object

    @property
    def param(self) -> str:
        return str(self.l)

    def __str__(self) -> str:
        return f"{self.l} = {self.r}"


@dataclass(frozen=True)
class Negated:
    inner: object

    def __post_init__(self):
        if isinstance(self.inner, Negated):
            raise ValueError("nested negation must be eliminated")

    @property
    def param(self) -> str:
        return self.inner.param

    def __str__(self) -> str:
        return f"not({self.inner})"


BoundAtom = Union[Equality, TraitBound, Outlives, LifetimeEq, Negated]

_KIND = {Equality: 0, TraitBound: 1, Outlives: 2, LifetimeEq: 3}


def negate(a: BoundAtom) -> BoundAtom:
    return a.inner if isinstance(a, Negated) else Negated(a)


def atom_key(a: BoundAtom) -> tuple:
    if isinstance(a, Negated):
        return (a.param, 4 + _KIND[type(a.inner)], str(a))
    return (a.param, _KIND[type(a)], str(a))


def is_type_param(name: str) -> bool:
    return not name.startswith("'")


@dataclass(frozen=True)
class Disjunct:
    atoms: tuple = ()

    @staticmethod
    def of(atoms: Iterable[BoundAtom]) -> "Disjunct":
        return Disjunct(tuple(sorted(set(atoms), key=atom_key)))

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in self.atoms) + "}"

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def params(self) -> list[str]:
        seen: list[str] = []
        for a in self.atoms:
            if a.param not in seen:
                seen.append(a.param)
        return seen

    def equalities(self) -> list[Equality]:
        return [a for a in self.atoms if isinstance(a, Equality)]


# ---------------------------------------------------------------- predicate formulas


@dataclass(frozen=True)
class Atom:
    atom: BoundAtom


@dataclass(frozen=True)
class Any:
    children: tuple


@dataclass(frozen=True)
class All:
    children: tuple


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class Canonical:
    disjuncts: tuple

    def __str__(self) -> str:
        return "[" + ", ".join(str(d) for d in self.disjuncts) + "]"


Predicate = Union[Atom, Any, All, Not, Canonical]


def pretty(p: Predicate) -> str:
    if isinstance(p, Atom):
        return str(p.atom)
    if isinstance(p, Any):
        return "any(" + ", ".join(pretty(c) for c in p.children) + ")"
    if isinstance(p, All):
        return "all(" + ", ".join(pretty(c) for c in p.children) + ")"
    if isinstance(p, Not):
        return f"not({pretty(p.child)})"
    return str(p)


class CanonicalizationError(Exception):
    """Raised when distribution to DNF would exceed the configured caps."""


MAX_DISJUNCTS = 256
MAX_ATOMS = 64


def _push_not(p: Predicate, neg: bool) -> Predicate:
    if isinstance(p, Canonical):
        p = Any(tuple(All(tuple(Atom(a) for a in d.atoms)) for d in p.disjuncts))
    if isinstance(p, Atom):
        return Atom(negate(p.atom)) if neg else p
    if isinstance(p, Not):
        return _push_not(p.child, not neg)
    kids = tuple(_push_not(c, neg) for c in p.children)
    if isinstance(p, Any):
        return All(kids) if neg else Any(kids)
    return Any(kids) if neg else All(kids)


def _reduce(ds: Iterable[frozenset]) -> list[frozenset]:
    """Drop contradictory disjuncts, duplicates and those subsumed by a subset."""
    uniq = []
    seen = set()
    for d in ds:
        if d in seen:
            continue
        seen.add(d)
        if any(negate(a) in d for a in d):
            continue
        uniq.append(d)
    uniq.sort(key=len)
    kept: list[frozenset] = []
    for d in uniq:
        if not any(k <= d for k in kept):
            kept.append(d)
    return kept


def _dnf(p: Predicate, max_disjuncts: int, max_atoms: int) -> list[frozenset]:
    if isinstance(p, Atom):
        return [frozenset([p.atom])]
    if isinstance(p, Any):
        out: list[frozenset] = []
        for c in p.children:
            out.extend(_dnf(c, max_disjuncts, max_atoms))
        out = _reduce(out)
        if len(out) > max_disjuncts:
            raise CanonicalizationError(f"predicate expands to {len(out)} disjuncts (cap {max_disjuncts})")
        return out
    acc = [frozenset()]
    for c in p.children:
        part = _dnf(c, max_disjuncts, max_atoms)
        acc = _reduce(a | b for a in acc for b in part)
        if len(acc) > max_disjuncts:
            raise CanonicalizationError(f"predicate expands to {len(acc)} disjuncts (cap {max_disjuncts})")
        for d in acc:
            if len(d) > max_atoms:
                raise CanonicalizationError(f"disjunct has {len(d)} atoms (cap {max_atoms})")
    return acc


def _merge_traits(d: frozenset) -> frozenset:
    bounds: dict[str, set] = {}
    rest = set()
    for a in d:
        if isinstance(a, TraitBound):
            bounds.setdefault(a.param, set()).update(a.traits)
        else:
            rest.add(a)
    rest.update(TraitBound(p, tuple(ts)) for p, ts in bounds.items())
    return frozenset(rest)


def canonicalize(p: Predicate, max_disjuncts: int = MAX_DISJUNCTS, max_atoms: int = MAX_ATOMS) -> Canonical:
    """Rewrite ``p`` into a flat, sorted disjunction of conjunctions of atoms."""
    nnf = _push_not(p, False)
    ds = _dnf(nnf, max_disjuncts, max_atoms)
    ds = _reduce(_merge_traits(d) for d in ds)
    disjuncts = sorted((Disjunct.of(d) for d in ds), key=lambda d: tuple(atom_key(a) for a in d.atoms))
    return Canonical(tuple(disjuncts))


def evaluate(p: Predicate, truth: Callable[[BoundAtom], bool]) -> bool:
    """Evaluate under an assignment of the positive single-trait atoms.

    A multi-trait bound holds when each of its single-trait bounds holds.
    """

    def atom(a):
        if isinstance(a, Negated):
            return not atom(a.inner)
        if isinstance(a, TraitBound) and len(a.traits) > 1:
            return all(truth(TraitBound(a.param, (t,))) for t in a.traits)
        return truth(a)

    if isinstance(p, Atom):
        return atom(p.atom)
    if isinstance(p, Any):
        return any(evaluate(c, truth) for c in p.children)
    if isinstance(p, All):
        return all(evaluate(c, truth) for c in p.children)
    if isinstance(p, Not):
        return not evaluate(p.child, truth)
    return any(all(atom(a) for a in d.atoms) for d in p.disjuncts)


# ---------------------------------------------------------------- consistency


@dataclass(frozen=True)
class ConsistencyReport:
    ok: bool
    pair: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_disjunct_consistency(d: Disjunct) -> ConsistencyReport:
    atoms = set(d.atoms)
    for a in d.atoms:
        if negate(a) in atoms:
            pos, neg = (a, negate(a)) if not isinstance(a, Negated) else (negate(a), a)
            return ConsistencyReport(False, (pos, neg))
    eqs = d.equalities()
    for x, y in itertools.combinations(eqs, 2):
        if x.param == y.param and not Unifier().unify(x.rhs, y.rhs):
            return ConsistencyReport(False, (x, y))
    return ConsistencyReport(True)


# ---------------------------------------------------------------- unification


def effective_equalities(d: Disjunct) -> list[tuple[str, object]]:
    """Equality atoms with ``T: 'a`` folded into an elided reference lifetime of ``T``."""
    outlives: dict[str, object] = {}
    for a in d.atoms:
        if isinstance(a, Outlives) and is_type_param(a.param) and a.param not in outlives:
            outlives[a.param] = a.lifetime
    out = []
    for a in d.equalities():
        rhs = a.rhs
        if isinstance(rhs, Ref) and is_anon(rhs.lifetime) and a.param in outlives:
            rhs = Ref(outlives[a.param], rhs.mutable, rhs.inner)
        out.append((a.param, rhs))
    return out


def folded_outlives(d: Disjunct) -> set:
    """Outlives atoms absorbed by :func:`effective_equalities`."""
    folded = set()
    eq_params = {p for p, rhs in ((a.param, a.rhs) for a in d.equalities()) if isinstance(rhs, Ref) and is_anon(rhs.lifetime)}
    seen = set()
    for a in d.atoms:
        if isinstance(a, Outlives) and a.param in eq_params and a.param not in seen:
            folded.add(a)
            seen.add(a.param)
    return folded


def _lifetime_names(d: Disjunct) -> list:
    names: list = []
    for a in d.atoms:
        inner = a.inner if isinstance(a, Negated) else a
        terms = []
        if isinstance(inner, Equality):
            terms = free_lifetimes(inner.rhs)
        elif isinstance(inner, Outlives):
            terms = [inner.lifetime]
            if not is_type_param(inner.param):
                terms.append(Named(inner.param[1:]))
        elif isinstance(inner, LifetimeEq):
            terms = [inner.l, inner.r]
        for t in terms:
            if isinstance(t, Named) and not is_anon(t) and t not in names:
                names.append(t)
    return names


def _lifetime_classes(d: Disjunct) -> dict:
    """Union-find over lifetimes explicitly equated inside ``d``."""
    parent: dict = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for a in d.atoms:
        if isinstance(a, LifetimeEq):
            parent[find(a.l)] = find(a.r)
    return {n: find(n) for n in _lifetime_names(d)}


def distinct_lifetimes_ok(d: Disjunct, u: Unifier) -> bool:
    """Distinct named lifetimes of one disjunct must stay distinct under ``u``."""
    classes = _lifetime_classes(d)
    names = list(classes)
    for x, y in itertools.combinations(names, 2):
        if classes[x] == classes[y]:
            continue
        if u.resolve_lt(x) == u.resolve_lt(y):
            return False
    return True


def feed_disjunct(u: Unifier, d: Disjunct) -> bool:
    for param, rhs in effective_equalities(d):
        if not u.unify(Var(param), rhs):
            return False
    for a in d.atoms:
        if isinstance(a, LifetimeEq) and not u.unify_lt(a.l, a.r):
            return False
    return True


def refuted(neg: Negated, other: Disjunct, u: Unifier) -> bool:
    """Whether the positive form of ``neg`` is forced true by ``other`` under ``u``."""
    inner = neg.inner
    if isinstance(inner, Equality):
        if inner.param in u.types:
            return u.resolve(Var(inner.param)) == u.resolve(inner.rhs)
        return False
    if isinstance(inner, TraitBound):
        return any(
            isinstance(a, TraitBound) and a.param == inner.param and set(inner.traits) <= set(a.traits)
            for a in other.atoms
        )
    if isinstance(inner, Outlives):
        want = u.resolve_lt(inner.lifetime)
        for a in other.atoms:
            if isinstance(a, Outlives) and a.param == inner.param and u.resolve_lt(a.lifetime) == want:
                return True
        for p, rhs in effective_equalities(other):
            if p == inner.param and isinstance(rhs, Ref) and not is_anon(rhs.lifetime):
                if u.resolve_lt(rhs.lifetime) == want:
                    return True
        return False
    if isinstance(inner, LifetimeEq):
        return u.resolve_lt(inner.l) == u.resolve_lt(inner.r)
    return False


def _params_of(*ds: Disjunct) -> set[str]:
    return {a.param for d in ds for a in d.atoms if is_type_param(a.param)}


def unify_disjuncts(a: Disjunct, b: Disjunct, params=None, rigid=frozenset()) -> Substitution | None:
    """Most general unifier of two disjuncts, or ``None`` when they cannot overlap.

    Parameters named in atoms are shared slots; the returned substitution is
    restricted to the remaining (inner) variables and lifetimes.
    """
    if params is None:
        params = _params_of(a, b)
    u = Unifier(rigid)
    if not (feed_disjunct(u, a) and feed_disjunct(u, b)):
        return None
    for x, y in ((a, b), (b, a)):
        for n in x.atoms:
            if isinstance(n, Negated) and refuted(n, y, u):
                return None
    if not (distinct_lifetimes_ok(a, u) and distinct_lifetimes_ok(b, u)):
        return None
    return u.substitution(exclude=set(params))


# ---------------------------------------------------------------- specificity


class SpecificityOrdering(enum.Enum):
    MoreSpecific = "MoreSpecific"
    LessSpecific = "LessSpecific"
    Equal = "Equal"
    Incomparable = "Incomparable"


def atom_rank(a: BoundAtom) -> int:
    """Position in the priority chain; 0 for atoms outside it (lifetime relations)."""
    neg = isinstance(a, Negated)
    inner = a.inner if neg else a
    if isinstance(inner, Equality):
        base = 8 if is_ground(inner.rhs) else 7
    elif isinstance(inner, TraitBound):
        base = 6 if len(inner.traits) > 1 else 5
    else:
        return 0
    return base - 4 if neg else base


def _compare_param(xa: list, xb: list) -> str:
    ra = max((atom_rank(a) for a in xa), default=0)
    rb = max((atom_rank(b) for b in xb), default=0)
    if ra != rb:
        return ">" if ra > rb else "<"
    verdict = "="
    if ra:
        pa = {a for a in xa if atom_rank(a) == ra}
        pb = {b for b in xb if atom_rank(b) == rb}
        if ra in (5, 6):
            ta = set().union(*(a.traits for a in pa))
            tb = set().union(*(b.traits for b in pb))
            verdict = "=" if ta == tb else ">" if ta > tb else "<" if ta < tb else "?"
        elif pa != pb:
            verdict = "?"
    if verdict != "=":
        return verdict
    sa, sb = set(xa), set(xb)
    return "=" if sa == sb else ">" if sa > sb else "<" if sa < sb else "?"


def compare_specificity(a: Disjunct, b: Disjunct) -> SpecificityOrdering:
    if a.atoms == b.atoms:
        return SpecificityOrdering.Equal
    params = sorted({x.param for x in a.atoms} | {x.param for x in b.atoms})
    verdicts = set()
    for p in params:
        verdicts.add(_compare_param([x for x in a.atoms if x.param == p], [x for x in b.atoms if x.param == p]))
    if "?" in verdicts or {"<", ">"} <= verdicts:
        return SpecificityOrdering.Incomparable
    if ">" in verdicts:
        return SpecificityOrdering.MoreSpecific
    if "<" in verdicts:
        return SpecificityOrdering.LessSpecific
    return SpecificityOrdering.Incomparable
