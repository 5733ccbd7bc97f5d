"""Overlap checking between specializations and call-site resolution."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .predicate import (
    Disjunct,
    Equality,
    LifetimeEq,
    Negated,
    Outlives,
    SpecificityOrdering,
    TraitBound,
    compare_specificity,
    distinct_lifetimes_ok,
    effective_equalities,
    folded_outlives,
    is_type_param,
    unify_disjuncts,
)
from .subst import EMPTY, Substitution, Unifier, apply_substitution
from .synthesis import ImplEntry, SpecializationRegistry
from .terms import (
    ANON,
    STATIC,
    WILDCARD,
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
    type_vars,
)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: tuple = (0, 0)
    notes: tuple = ()

    def render(self, path: str = "<input>", src: str | None = None) -> str:
        loc = path
        if src is not None:
            line = src.count("\n", 0, self.span[0]) + 1
            col = self.span[0] - (src.rfind("\n", 0, self.span[0]) + 1) + 1
            loc = f"{path}:{line}:{col}"
        out = [f"error[{self.code}] {self.message}", f"  --> {loc}"]
        out += [f"  = note: {n}" for n in self.notes]
        return "\n".join(out)


class CoherenceError(Exception):
    def __init__(self, diagnostic: Diagnostic, candidates: tuple = ()):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic
        self.candidates = candidates


# ---------------------------------------------------------------- call sites


@dataclass(frozen=True)
class CallSiteSpec:
    receiver_var: str
    method_name: str
    args: tuple  # argument expressions, verbatim
    receiver_type: object
    bounds: tuple  # TypeTerm or WILDCARD per trait parameter
    trait_bounds: tuple = ()  # ((TypeTerm, (trait, ...)), ...)
    lifetime_facts: tuple = ()  # Outlives / LifetimeEq atoms over call-site lifetimes
    span: tuple = (0, 0)
    trait: str | None = None  # explicit trait name, when known


@dataclass(frozen=True)
class Resolution:
    kind: str  # "Specialized" or "Default"
    trait: str
    impl: ImplEntry | None = None
    substitution: Substitution = EMPTY
    candidates: tuple = ()
    stages: tuple = ()  # ((stage, surviving impl ids), ...)
    bounds: tuple = ()  # call-site bounds after lifetime normalization

    @property
    def meta_trait(self) -> str:
        return self.impl.meta_trait if self.impl is not None else self.trait


STAGES = ("implementor-equality", "trait-equality", "trait-bounds", "lifetimes")


class _Facts:
    """Call-site lifetime facts closed under transitivity."""

    def __init__(self, facts):
        self.static: set = set()
        edges: set = set()
        self.eqs: list = []
        for f in facts:
            if isinstance(f, Outlives):
                lhs = Named(f.param[1:]) if not is_type_param(f.param) else None
                if lhs is None:
                    continue
                if isinstance(f.lifetime, Static):
                    self.static.add(lhs)
                else:
                    edges.add((lhs, f.lifetime))
            elif isinstance(f, LifetimeEq):
                self.eqs.append((f.l, f.r))
                edges.add((f.l, f.r))
                edges.add((f.r, f.l))
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in itertools.product(list(edges), list(edges)):
                if b == c and (a, d) not in edges:
                    edges.add((a, d))
                    changed = True
        for a, b in list(edges):
            if b in self.static and a not in self.static:
                self.static.add(a)
        self.edges = edges

    def normalize(self, lt):
        return STATIC if lt in self.static else lt

    def outlives(self, a, b) -> bool:
        a, b = self.normalize(a), self.normalize(b)
        return a == b or isinstance(a, Static) or (a, b) in self.edges


def _map_lifetimes(t, f, bound=frozenset()):
    if is_lifetime(t):
        return t if t in bound else f(t)
    if isinstance(t, Ground):
        return Ground(t.path, tuple(_map_lifetimes(a, f, bound) for a in t.args))
    if isinstance(t, Ref):
        lt = t.lifetime if t.lifetime in bound else f(t.lifetime)
        return Ref(lt, t.mutable, _map_lifetimes(t.inner, f, bound))
    if isinstance(t, Tuple):
        return Tuple(tuple(_map_lifetimes(i, f, bound) for i in t.items))
    if isinstance(t, FnPtr):
        inner = bound | frozenset(t.binders)
        return FnPtr(t.binders, tuple(_map_lifetimes(p, f, inner) for p in t.params), _map_lifetimes(t.ret, f, inner))
    return t


def _freshen(t, counter, facts: _Facts):
    """Elided lifetimes outside fn pointers become fresh locals; facts normalize named ones."""
    if isinstance(t, FnPtr) or t is WILDCARD:
        return _map_lifetimes(t, facts.normalize) if t is not WILDCARD else t
    if isinstance(t, Ref):
        lt = Fresh(next(counter)) if is_anon(t.lifetime) else facts.normalize(t.lifetime)
        return Ref(lt, t.mutable, _freshen(t.inner, counter, facts))
    if isinstance(t, Ground):
        return Ground(t.path, tuple(_freshen(a, counter, facts) if not is_lifetime(a) else facts.normalize(a) for a in t.args))
    if isinstance(t, Tuple):
        return Tuple(tuple(_freshen(i, counter, facts) for i in t.items))
    return t


def _same_path(a: str, b: str) -> bool:
    return a == b or a.rsplit("::", 1)[-1] == b.rsplit("::", 1)[-1]


def impls_for(reg: SpecializationRegistry, trait: str, receiver) -> list[ImplEntry]:
    path = receiver.path if isinstance(receiver, Ground) else None
    return [
        e
        for e in reg.impls
        if e.base == trait and path is not None and _same_path(e.header.implementor_path, path)
    ]


def find_trait(reg: SpecializationRegistry, cs: CallSiteSpec) -> str:
    if cs.trait is not None:
        return cs.trait
    hits = []
    for name, t in reg.base_traits.items():
        if t.method(cs.method_name) is not None and impls_for(reg, name, cs.receiver_type):
            hits.append(name)
    if not hits:
        raise CoherenceError(
            Diagnostic("MM0006", f"no specializable trait provides method `{cs.method_name}` for `{render(cs.receiver_type)}`", cs.span)
        )
    if len(hits) > 1:
        raise CoherenceError(
            Diagnostic("MM0002", "ambiguous specialization at call site", cs.span, (f"method `{cs.method_name}` is provided by {', '.join(sorted(hits))}",))
        )
    return hits[0]


# ---------------------------------------------------------------- matching one impl


class _Match:
    def __init__(self, entry: ImplEntry, actual: dict, receiver_args: dict, wild: set, traits: list, facts: _Facts, rigid, rigid_lts):
        self.e = entry
        self.d = entry.slot_disjunct
        self.u = Unifier(rigid, rigid_lts)
        self.actual = actual
        self.receiver_args = receiver_args
        self.wild = wild
        self.traits = traits
        self.facts = facts

    def _eq_stage(self, slots, actual: dict) -> bool:
        u = self.u
        for s, t in actual.items():
            if not u.unify(Var(s), t):
                return False
        for p, rhs in effective_equalities(self.d):
            if p in slots and not u.unify(Var(p), rhs):
                return False
        return True

    def implementor_equality(self) -> bool:
        if any(a.param in self.wild for a in self.d.atoms):
            return False
        return self._eq_stage(set(self.e.self_slots) - set(self.e.trait_slots), self.receiver_args)

    def trait_equality(self) -> bool:
        u = self.u
        only_self = set(self.e.self_slots) - set(self.e.trait_slots)
        slots = {p for p, _ in effective_equalities(self.d) if p not in only_self}
        if not self._eq_stage(slots, self.actual):
            return False
        for a in self.d.atoms:
            if isinstance(a, LifetimeEq) and not u.unify_lt(a.l, a.r):
                return False
        return True

    def _clauses_for(self, t) -> set:
        out: set = set()
        r = self.u.resolve(t)
        for ty, traits in self.traits:
            if self.u.resolve(ty) == r:
                out.update(traits)
        return out

    def trait_bounds(self) -> bool:
        only_self = set(self.e.self_slots) - set(self.e.trait_slots)
        for a in self.d.atoms:
            if isinstance(a, TraitBound) and a.param not in only_self:
                x = self.u.resolve(Var(a.param))
                if isinstance(x, Var):
                    return False
                if not set(a.traits) <= self._clauses_for(x):
                    return False
        return True

    def _lts_of(self, t) -> list:
        return _all_lifetimes(self.u.resolve(t))

    def lifetimes(self) -> bool:
        u, facts = self.u, self.facts
        folded = folded_outlives(self.d)
        for a in self.d.atoms:
            if isinstance(a, Outlives) and a not in folded:
                target = u.resolve_lt(a.lifetime)
                if is_type_param(a.param):
                    x = u.resolve(Var(a.param))
                    if isinstance(x, Ref) and u._lt_flexible(target):
                        u.unify_lt(target, x.lifetime)
                        continue
                    for lt in self._lts_of(x):
                        if not u._lt_flexible(target) and not facts.outlives(u.resolve_lt(lt), target):
                            return False
                else:
                    src = u.resolve_lt(Named(a.param[1:]))
                    if u._lt_flexible(src) or u._lt_flexible(target):
                        continue
                    if not facts.outlives(src, target):
                        return False
        for a in self.d.atoms:
            if isinstance(a, Negated) and not self._negation_holds(a.inner):
                return False
        return distinct_lifetimes_ok(self.d, u)

    def _negation_holds(self, inner) -> bool:
        u = self.u
        if isinstance(inner, Equality):
            x = u.resolve(Var(inner.param))
            if isinstance(x, Var) or type_vars(x) - u.rigid:
                return False
            return not u.copy().unify(x, inner.rhs)
        if isinstance(inner, TraitBound):
            # negative trait evidence is never available at a call site
            return False
        if isinstance(inner, Outlives):
            target = u.resolve_lt(inner.lifetime)
            if u._lt_flexible(target):
                return False
            if is_type_param(inner.param):
                lts = [u.resolve_lt(l) for l in self._lts_of(Var(inner.param))]
            else:
                lts = [u.resolve_lt(Named(inner.param[1:]))]
            if not lts or any(u._lt_flexible(l) or is_anon(l) for l in lts):
                return False
            return not all(self.facts.outlives(l, target) for l in lts)
        if isinstance(inner, LifetimeEq):
            l, r = u.resolve_lt(inner.l), u.resolve_lt(inner.r)
            if u._lt_flexible(l) or u._lt_flexible(r):
                return False
            return l != r
        return False

    def substitution(self) -> Substitution:
        """Bindings of the impl's formal variables.

        A slot pinned by a ground, lifetime-free equality carries no
        information and is left out.
        """
        keep = set(self.e.trait_slots) | set(self.e.self_slots)
        lts: set = set()
        for a in self.d.atoms:
            inner = a.inner if isinstance(a, Negated) else a
            if isinstance(inner, Equality):
                keep |= type_vars(inner.rhs)
                lts.update(free_lifetimes(inner.rhs))
                if not isinstance(a, Negated) and not type_vars(inner.rhs) and not free_lifetimes(inner.rhs):
                    if not any(p == inner.param for p in self._lifetime_params()):
                        keep.discard(inner.param)
            elif isinstance(inner, Outlives):
                if isinstance(inner.lifetime, Named):
                    lts.add(inner.lifetime)
                if not is_type_param(inner.param):
                    lts.add(Named(inner.param[1:]))
            elif isinstance(inner, LifetimeEq):
                lts.update(x for x in (inner.l, inner.r) if isinstance(x, Named))
        lts.discard(ANON)
        return self.u.substitution(keep_types=keep, keep_lifetimes=lts)

    def _lifetime_params(self) -> set:
        """Type params that carry an outlives atom (their lifetime is informative)."""
        return {a.param for a in self.d.atoms if isinstance(a, Outlives) and is_type_param(a.param)}


def _all_lifetimes(t) -> list:
    out: list = []

    def go(x, bound):
        if isinstance(x, (Named, Fresh, Static)):
            if x not in bound and not is_anon(x):
                out.append(x)
        elif isinstance(x, Ground):
            for a in x.args:
                go(a, bound)
        elif isinstance(x, Ref):
            go(x.lifetime, bound)
            go(x.inner, bound)
        elif isinstance(x, Tuple):
            for i in x.items:
                go(i, bound)
        elif isinstance(x, FnPtr):
            for p in x.params:
                go(p, bound | set(x.binders))
            go(x.ret, bound | set(x.binders))

    go(t, set())
    return out


# ---------------------------------------------------------------- resolution


def _rename_actual(t, clash: set):
    if isinstance(t, Var):
        return Var(t.name + "_") if t.name in clash else t
    if isinstance(t, Ground):
        return Ground(t.path, tuple(_rename_actual(a, clash) for a in t.args))
    if isinstance(t, Ref):
        return Ref(t.lifetime, t.mutable, _rename_actual(t.inner, clash))
    if isinstance(t, Tuple):
        return Tuple(tuple(_rename_actual(i, clash) for i in t.items))
    if isinstance(t, FnPtr):
        return FnPtr(t.binders, tuple(_rename_actual(p, clash) for p in t.params), _rename_actual(t.ret, clash))
    return t


def _formal_names(entries) -> tuple[set, set]:
    tys: set = set()
    lts: set = set()
    for e in entries:
        for a in e.slot_disjunct.atoms:
            inner = a.inner if isinstance(a, Negated) else a
            tys.add(inner.param)
            if isinstance(inner, Equality):
                tys |= type_vars(inner.rhs)
                lts.update(free_lifetimes(inner.rhs))
            elif isinstance(inner, Outlives):
                lts.add(inner.lifetime)
            elif isinstance(inner, LifetimeEq):
                lts.update((inner.l, inner.r))
        tys |= set(e.trait_slots) | set(e.self_slots)
    return tys, lts


def resolve_call_site(cs: CallSiteSpec, reg: SpecializationRegistry, fresh=None) -> Resolution:
    trait = find_trait(reg, cs)
    decl = reg.base_traits[trait]
    arity = len(decl.type_params)
    if len(cs.bounds) != arity:
        raise CoherenceError(
            Diagnostic(
                "MM0002",
                "ambiguous specialization at call site",
                cs.span,
                (f"bound list has {len(cs.bounds)} entr{'y' if len(cs.bounds) == 1 else 'ies'} but `{trait}` takes {arity} type parameter(s)",),
            )
        )
    counter = fresh if fresh is not None else itertools.count()
    facts = _Facts(cs.lifetime_facts)
    entries = [e for e in impls_for(reg, trait, cs.receiver_type) if e.meta_trait != trait]
    formal_tys, formal_lts = _formal_names(entries)
    receiver = _freshen(cs.receiver_type, counter, facts)
    bounds = tuple(_freshen(b, counter, facts) for b in cs.bounds)
    clauses = [(_freshen(t, counter, facts), tuple(tr)) for t, tr in cs.trait_bounds]
    rigid: set = set()
    rigid_lts: set = set()
    for t in (receiver, *bounds, *(c[0] for c in clauses)):
        if t is WILDCARD:
            continue
        rigid |= type_vars(t)
        rigid_lts.update(lt for lt in _all_lifetimes(t) if isinstance(lt, Named))
    clash = rigid & formal_tys
    if clash:
        fix = lambda t: t if t is WILDCARD else _rename_actual(t, clash)  # noqa: E731
        receiver, bounds = fix(receiver), tuple(fix(b) for b in bounds)
        clauses = [(fix(t), tr) for t, tr in clauses]
        rigid = {v + "_" if v in clash else v for v in rigid}
    if rigid_lts & formal_lts:
        lclash = rigid_lts & formal_lts
        ren = lambda lt: Named(lt.name + "_") if lt in lclash else lt  # noqa: E731
        fix = lambda t: t if t is WILDCARD else _map_lifetimes(t, ren)  # noqa: E731
        receiver, bounds = fix(receiver), tuple(fix(b) for b in bounds)
        clauses = [(fix(t), tr) for t, tr in clauses]
        rigid_lts = {ren(lt) for lt in rigid_lts}

    stages: list = []
    rargs = receiver.args if isinstance(receiver, Ground) else ()
    survivors: list[_Match] = []
    for e in entries:
        actual = {s: b for s, b in zip(e.trait_slots, bounds) if b is not WILDCARD}
        wild = {s for s, b in zip(e.trait_slots, bounds) if b is WILDCARD}
        receiver_args = dict(zip(e.self_slots, rargs))
        survivors.append(_Match(e, actual, receiver_args, wild, clauses, facts, rigid, rigid_lts))
    for name in STAGES:
        survivors = [m for m in survivors if getattr(m, name.replace("-", "_"))()]
        stages.append((name, tuple(m.e.id for m in survivors)))
    ids = tuple(m.e.id for m in survivors)
    if not survivors:
        return Resolution("Default", trait, None, EMPTY, (), tuple(stages), bounds)
    maxima = [
        m
        for m in survivors
        if not any(compare_specificity(o.d, m.d) is SpecificityOrdering.MoreSpecific for o in survivors if o is not m)
    ]
    if len(maxima) > 1:
        notes = tuple(f"candidate {m.e.label} where {m.d}" for m in maxima)
        raise CoherenceError(Diagnostic("MM0002", "ambiguous specialization at call site", cs.span, notes), tuple(m.e.id for m in maxima))
    best = maxima[0]
    return Resolution("Specialized", trait, best.e, best.substitution(), ids, tuple(stages), bounds)


# ---------------------------------------------------------------- overlaps


@dataclass(frozen=True)
class OverlapError:
    impl_a: ImplEntry
    impl_b: ImplEntry
    witness: Substitution
    verdict: str  # "Forbidden" or "PermittedBySpecificity"
    fixed_implementor: tuple = ()
    fixed_trait: tuple = ()

    def diagnostic(self) -> Diagnostic:
        notes = (
            f"first: {self.impl_a.label} where {self.impl_a.disjunct or 'true'}",
            f"second: {self.impl_b.label} where {self.impl_b.disjunct or 'true'}",
            f"witness: {self.witness}",
        )
        return Diagnostic("MM0001", "overlapping specializations", self.impl_b.span, notes)


def _rename_apart(e: ImplEntry) -> Disjunct:
    slots = set(e.trait_slots) | set(e.self_slots)
    inner_tys: set = set()
    inner_lts: set = set()
    for a in e.slot_disjunct.atoms:
        x = a.inner if isinstance(a, Negated) else a
        if isinstance(x, Equality):
            inner_tys |= type_vars(x.rhs) - slots
            inner_lts.update(free_lifetimes(x.rhs))
        elif isinstance(x, Outlives):
            inner_lts.add(x.lifetime)
            if not is_type_param(x.param):
                inner_lts.add(Named(x.param[1:]))
        elif isinstance(x, LifetimeEq):
            inner_lts.update((x.l, x.r))
    tmap = Substitution({v: Var(v + "'") for v in inner_tys}, {lt: Named(lt.name + "'") for lt in inner_lts if isinstance(lt, Named)})

    def ren(a):
        if isinstance(a, Negated):
            return Negated(ren(a.inner))
        if isinstance(a, Equality):
            return Equality(a.param, apply_substitution(tmap, a.rhs))
        if isinstance(a, Outlives):
            p = a.param if is_type_param(a.param) else str(tmap.lifetimes.get(Named(a.param[1:]), Named(a.param[1:])))
            return Outlives(p, tmap.lifetimes.get(a.lifetime, a.lifetime))
        if isinstance(a, LifetimeEq):
            return LifetimeEq(tmap.lifetimes.get(a.l, a.l), tmap.lifetimes.get(a.r, a.r))
        return a

    return Disjunct.of(ren(a) for a in e.slot_disjunct.atoms)


def check_overlaps(reg: SpecializationRegistry) -> list[OverlapError]:
    out = []
    for a, b in itertools.combinations(reg.impls, 2):
        if a.base != b.base or not _same_path(a.header.implementor_path, b.header.implementor_path):
            continue
        if a.meta_trait == a.base and b.meta_trait == b.base and (a.slot_disjunct.atoms or b.slot_disjunct.atoms):
            # two plain impls of the base trait are the host compiler's business
            continue
        slots = set(a.trait_slots) | set(a.self_slots) | set(b.trait_slots) | set(b.self_slots)
        da, db = a.slot_disjunct, _rename_apart(b)
        self_only = set(a.self_slots) - set(a.trait_slots)
        common = set(da.atoms) & set(db.atoms)
        fixed_impl = tuple(x for x in da.atoms if x in common and x.param in self_only)
        fixed_tr = tuple(x for x in da.atoms if x in common and x.param not in self_only)
        witness = unify_disjuncts(da, db, params=slots)
        if witness is None:
            continue
        order = compare_specificity(a.slot_disjunct, b.slot_disjunct)
        verdict = "PermittedBySpecificity" if order in (SpecificityOrdering.MoreSpecific, SpecificityOrdering.LessSpecific) else "Forbidden"
        out.append(OverlapError(a, b, witness, verdict, fixed_impl, fixed_tr))
    return out


def verify_resolution(cs: CallSiteSpec, reg: SpecializationRegistry, r: Resolution) -> list[str]:
    """Check every atom of the chosen impl under ``r.substitution`` against the call site.

    Returns the atoms that fail; an empty list means the resolution is sound.
    """
    if r.kind != "Specialized":
        return []
    e = r.impl
    substitution = r.substitution
    actual = dict(zip(e.trait_slots, r.bounds))
    clauses = [(t, set(tr)) for t, tr in cs.trait_bounds]
    failures = []

    def val(p):
        # slots pinned by a ground bound are left out of substitution; read them off the call site
        if p not in substitution.types and actual.get(p, WILDCARD) is not WILDCARD:
            return actual[p]
        return apply_substitution(substitution, Var(p))

    for p, rhs in effective_equalities(e.slot_disjunct):
        if val(p) != apply_substitution(substitution, rhs) or (p in actual and actual[p] is not WILDCARD and val(p) != actual[p]):
            failures.append(f"{p} = {render(rhs)}")
    for a in e.slot_disjunct.atoms:
        if isinstance(a, TraitBound) and a.param in e.trait_slots:
            x = val(a.param)
            have = set().union(*(tr for t, tr in clauses if _erase(t) == _erase(x))) if clauses else set()
            if not set(a.traits) <= have:
                failures.append(str(a))
    return failures


def _erase(t):
    return _map_lifetimes(t, lambda lt: ANON)
