"""Workaround-pattern tagging and already/newly specializable classification."""

from __future__ import annotations

import enum
import itertools

from ..predicate import Disjunct, Equality, unify_disjuncts
from ..terms import FnPtr, Ground, Ref, Tuple, Var
from .grouping import TYPE_SUFFIXES, has_type_suffix, stem
from .records import FnKind, FunctionRecord


class Pattern(enum.Enum):
    SelectionInTrait = "SelectionInTrait"
    ManualMonomorphizedTraits = "ManualMonomorphizedTraits"
    CallerSelectedFunctions = "CallerSelectedFunctions"
    InherentPerVariant = "InherentPerVariant"
    NoPattern = "None"


class Specializability(enum.Enum):
    Already = "Already"
    Newly = "Newly"


def _head(type_text: str | None) -> str:
    return (type_text or "").split("<", 1)[0].strip()


def classify_pattern(members: list[FunctionRecord], suffixes=TYPE_SUFFIXES) -> Pattern:
    kinds = {m.kind for m in members}
    containers = {m.container for m in members}
    if kinds <= {FnKind.TraitFn, FnKind.TraitImplFn} and len(containers) == 1:
        return Pattern.SelectionInTrait
    if kinds == {FnKind.TraitImplFn}:
        if len({m.trait_name for m in members}) == 1 and len({m.name for m in members}) == 1 and len(containers) == len(members):
            return Pattern.ManualMonomorphizedTraits
    if kinds == {FnKind.Bare}:
        if len({stem(m.name, suffixes) for m in members}) == 1 and any(has_type_suffix(m.name, suffixes) for m in members):
            return Pattern.CallerSelectedFunctions
    if kinds == {FnKind.InherentImplFn}:
        if len(containers) == len(members) and len({_head(m.self_type) for m in members}) == 1:
            return Pattern.InherentPerVariant
        if len(containers) == 1 and any(has_type_suffix(m.name, suffixes) for m in members):
            return Pattern.InherentPerVariant
    return Pattern.NoPattern


_TYPE_ID = {"TypeId", "type_id"}
_TRANSMUTE = {"transmute", "transmute_copy"}


def dispatch_evidence(members: list[FunctionRecord], corpus: list[FunctionRecord]) -> dict:
    """Whether some caller of a member also uses type-identity dispatch or transmutation."""
    names = {m.name for m in members}
    keys = {m.key for m in members}
    type_id = transmute = False
    for r in corpus:
        if r.key in keys or not (r.calls & names):
            continue
        type_id = type_id or bool(r.body_idents & _TYPE_ID)
        transmute = transmute or bool(r.body_idents & _TRANSMUTE)
    return {"type_id_dispatch": type_id, "transmute": transmute}


def _rename(t, prefix: str):
    if isinstance(t, Var):
        return Var(prefix + t.name)
    if isinstance(t, Ground):
        return Ground(t.path, tuple(_rename(a, prefix) for a in t.args))
    if isinstance(t, Ref):
        return Ref(t.lifetime, t.mutable, _rename(t.inner, prefix))
    if isinstance(t, Tuple):
        return Tuple(tuple(_rename(i, prefix) for i in t.items))
    if isinstance(t, FnPtr):
        return FnPtr(t.binders, tuple(_rename(p, prefix) for p in t.params), _rename(t.ret, prefix))
    return t


def lift_signature(types, prefix: str, order=None) -> Disjunct:
    """One equality atom per non-generic parameter type, over slots ``P0, P1, ...``."""
    order = range(len(types)) if order is None else order
    atoms = []
    for slot, k in enumerate(order):
        t = types[k]
        if t is None or isinstance(t, Var):
            continue
        atoms.append(Equality(f"P{slot}", _rename(t, prefix)))
    return Disjunct.of(atoms)


MAX_PERMUTED_ARITY = 6


def separable(a: FunctionRecord, b: FunctionRecord) -> bool:
    """True when some parameter permutation keeps the two signatures from unifying."""
    da = lift_signature(a.param_types, "a.")
    n = len(b.param_types)
    perms = itertools.permutations(range(n)) if n <= MAX_PERMUTED_ARITY else [tuple(range(n))]
    for perm in perms:
        if unify_disjuncts(da, lift_signature(b.param_types, "b.", perm)) is None:
            return True
    return False


def classify_specializability(members: list[FunctionRecord]) -> Specializability:
    for a, b in itertools.combinations(members, 2):
        if not separable(a, b):
            return Specializability.Newly
    return Specializability.Already
