"""Meta-monomorphized trait synthesis and specialization extraction."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

from .predicate import (
    Disjunct,
    Equality,
    LifetimeEq,
    Negated,
    Outlives,
    TraitBound,
    effective_equalities,
    folded_outlives,
    is_type_param,
)
from .rust.lexer import Token, join_tokens, tokenize
from .subst import Substitution, apply_substitution
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
    render,
    type_vars,
)


class SynthesisError(Exception):
    pass


# ---------------------------------------------------------------- declarations


@dataclass(frozen=True)
class AssociatedItem:
    """A trait or impl member: the signature as tokens and an optional verbatim body."""

    kind: str  # "fn", "type" or "const"
    name: str
    signature: tuple  # tuple[Token, ...]
    body: str | None = None
    self_kind: str = ""

    def render(self) -> str:
        sig = join_tokens(list(self.signature))
        return f"{sig} {self.body}" if self.body is not None else f"{sig};"


@dataclass(frozen=True)
class TraitDecl:
    name: str
    type_params: tuple = ()
    lifetime_params: tuple = ()
    items: tuple = ()
    param_bounds: tuple = ()  # ((param, (bound, ...)), ...)

    def method(self, name: str) -> AssociatedItem | None:
        for it in self.items:
            if it.kind == "fn" and it.name == name:
                return it
        return None

    def generic_list(self) -> str:
        bounds = dict(self.param_bounds)
        parts = [f"'{lt}" for lt in self.lifetime_params]
        for p in self.type_params:
            b = bounds.get(p)
            parts.append(f"{p}: {' + '.join(b)}" if b else p)
        return f"<{', '.join(parts)}>" if parts else ""

    def render(self) -> str:
        lines = [f"trait {self.name}{self.generic_list()} {{"]
        for it in self.items:
            lines.append("    " + it.render())
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ImplHeader:
    implementor_path: str
    implementor_args: tuple
    trait_name: str
    trait_args: tuple
    generics: tuple = ()  # ((name, (trait, ...) or None), ...)
    lifetime_generics: tuple = ()  # names without the quote
    where: tuple = ()  # tokens of an optional where clause

    @property
    def implementor(self):
        return Ground(self.implementor_path, self.implementor_args)

    def generic_names(self) -> list[str]:
        return [g for g, _ in self.generics]


@dataclass(frozen=True)
class ImplSource:
    header: ImplHeader
    items: tuple  # AssociatedItem with bodies


@dataclass(frozen=True)
class ExtractedImpl:
    header: ImplHeader
    trait_ref: str  # rendered `Name<args>`
    items: tuple

    def render(self) -> str:
        h = self.header
        parts = [f"'{lt}" for lt in h.lifetime_generics]
        for name, bounds in h.generics:
            parts.append(f"{name}: {' + '.join(bounds)}" if bounds else name)
        gen = f"<{', '.join(parts)}>" if parts else ""
        where = (" " + join_tokens(list(h.where))) if h.where else ""
        lines = [f"impl{gen} {self.trait_ref} for {render(h.implementor)}{where} {{"]
        for it in self.items:
            lines.append("    " + it.render())
        lines.append("}")
        return "\n".join(lines)


# ---------------------------------------------------------------- token substitution


def _term_tokens(t) -> list[Token]:
    return [Token(x.kind, x.text, -1, -1) for x in tokenize(render(t))]


def substitute_tokens(toks, types: dict, lifetimes: dict | None = None) -> tuple:
    """Replace identifier tokens naming a type parameter, and lifetime tokens, by terms."""
    lifetimes = lifetimes or {}
    out: list[Token] = []
    toks = list(toks)
    for k, t in enumerate(toks):
        prev = toks[k - 1].text if k else ""
        if t.kind == "ident" and t.text in types and prev not in (".", "::"):
            out.extend(_term_tokens(types[t.text]))
        elif t.kind == "lifetime" and Named(t.text[1:]) in lifetimes:
            repl = lifetimes[Named(t.text[1:])]
            out.append(Token("lifetime", str(repl) if not isinstance(repl, Fresh) else "'_", -1, -1))
        else:
            out.append(t)
    return tuple(out)


# ---------------------------------------------------------------- naming


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _enc_lt(lt) -> str:
    if isinstance(lt, Static):
        return "lt_static"
    if isinstance(lt, Fresh):
        return f"lt_local{lt.id}"
    return f"lt_{lt.name}"


def _enc_type(t) -> str:
    if isinstance(t, (Static, Named, Fresh)):
        return _enc_lt(t)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Ground):
        if t.path == "[]":
            head = "slice"
        elif t.path.startswith("[;"):
            head = f"array_{t.path[2:-1]}"
        elif t.path in ("*const", "*mut"):
            head = "ptr_" + t.path[1:]
        else:
            head = "_".join(s for s in t.path.split("::") if s)
        return "_".join([head] + [_enc_type(a) for a in t.args])
    if isinstance(t, Ref):
        s = "ref_"
        if t.mutable:
            s += "mut_"
        if not is_anon(t.lifetime):
            s += _enc_lt(t.lifetime) + "_"
        return s + _enc_type(t.inner)
    if isinstance(t, Tuple):
        return "_".join(["tuple"] + [_enc_type(i) for i in t.items]) if t.items else "unit"
    if isinstance(t, FnPtr):
        parts = ["fn"]
        if t.binders:
            parts.append("for_" + "_".join(_enc_lt(b) for b in t.binders))
        parts += [_enc_type(p) for p in t.params]
        parts += ["ret", _enc_type(t.ret)]
        return "_".join(parts)
    raise TypeError(t)


def _enc_atom(a) -> str:
    if isinstance(a, Equality):
        return _enc_type(a.rhs)
    if isinstance(a, TraitBound):
        return "_".join(_enc_type(Ground(tr)) if _IDENT.match(tr.replace("::", "_")) else tr for tr in a.traits)
    if isinstance(a, Outlives):
        return _enc_lt(a.lifetime)
    if isinstance(a, LifetimeEq):
        return f"{_enc_lt(a.l)}_eq_{_enc_lt(a.r)}"
    if isinstance(a, Negated):
        return "not_" + _enc_atom(a.inner)
    raise TypeError(a)


def _digest(base: str, d: Disjunct) -> str:
    return hashlib.sha256(f"{base}|{d}".encode()).hexdigest()[:8]


def mangle_name(base: str, d: Disjunct, taken: dict | None = None) -> str:
    """Readable, deterministic name for the meta-trait of ``base`` under ``d``.

    ``taken`` maps names already in use to their disjuncts; a clash with a
    different disjunct, or an encoding that is not a valid identifier, adds an
    8-hex-digit hash suffix.
    """
    if not d.atoms:
        return base
    readable = base + "_" + "_".join(_enc_atom(a) for a in d.atoms)
    readable = re.sub(r"_+", "_", readable).rstrip("_")
    if _IDENT.match(readable) and (taken is None or taken.get(readable, d) == d):
        return readable
    safe = re.sub(r"[^A-Za-z0-9_]", "_", readable)
    safe = re.sub(r"_+", "_", safe).rstrip("_")
    return f"{safe}_{_digest(base, d)}"


# ---------------------------------------------------------------- partition


@dataclass(frozen=True)
class ParameterPartition:
    eq_bound_in_trait: tuple = ()
    trait_bound_in_trait: tuple = ()
    generic_in_trait: tuple = ()
    eq_bound_shared: tuple = ()
    trait_bound_shared: tuple = ()
    generic_shared: tuple = ()
    eq_bound_impl_only: tuple = ()
    trait_bound_impl_only: tuple = ()
    generic_impl_only: tuple = ()

    def eq_bound(self) -> set:
        return set(self.eq_bound_in_trait) | set(self.eq_bound_shared) | set(self.eq_bound_impl_only)

    def trait_bound(self) -> set:
        return set(self.trait_bound_in_trait) | set(self.trait_bound_shared) | set(self.trait_bound_impl_only)


def partition_parameters(t: TraitDecl, h: ImplHeader, d: Disjunct) -> ParameterPartition:
    params = h.generic_names()
    known = set(params)
    for a in d.atoms:
        if is_type_param(a.param) and a.param not in known:
            raise SynthesisError(f"bound mentions unknown parameter `{a.param}`")
    in_trait = set().union(*(type_vars(x) for x in h.trait_args)) if h.trait_args else set()
    in_self = set().union(*(type_vars(x) for x in h.implementor_args)) if h.implementor_args else set()
    eq = {a.param for a in d.atoms if isinstance(a, Equality)}
    tb = {a.param for a in d.atoms if isinstance(a, TraitBound)} - eq
    buckets: dict[str, list] = {k: [] for k in ParameterPartition.__dataclass_fields__}
    for p in params:
        kind = "eq_bound" if p in eq else "trait_bound" if p in tb else "generic"
        if p in in_trait and p in in_self:
            where = "shared"
        elif p in in_self:
            where = "impl_only"
        else:
            where = "in_trait"
        buckets[f"{kind}_{where}"].append(p)
    return ParameterPartition(**{k: tuple(v) for k, v in buckets.items()})


# ---------------------------------------------------------------- synthesis


def equality_images(d: Disjunct) -> dict:
    """Map each equality-bound parameter to its bound, with bounds expressed
    through other equality-bound parameters resolved."""
    eq: dict = {}
    for p, rhs in effective_equalities(d):
        eq.setdefault(p, rhs)
    for _ in range(len(eq) + 1):
        changed = False
        for p, rhs in list(eq.items()):
            new = apply_substitution(Substitution({k: v for k, v in eq.items() if k != p}), rhs)
            if new != rhs:
                eq[p] = new
                changed = True
        if not changed:
            return eq
    raise SynthesisError("equality bounds refer to each other cyclically")


def _lifetimes_of_disjunct(d: Disjunct, images: dict) -> list:
    out: list = []

    def add(lt):
        if isinstance(lt, Named) and not is_anon(lt) and lt not in out:
            out.append(lt)

    for a in d.atoms:
        inner = a.inner if isinstance(a, Negated) else a
        if isinstance(inner, Equality):
            for lt in free_lifetimes(images.get(inner.param, inner.rhs)):
                add(lt)
        elif isinstance(inner, Outlives):
            add(inner.lifetime)
            if not is_type_param(inner.param):
                add(Named(inner.param[1:]))
        elif isinstance(inner, LifetimeEq):
            add(inner.l)
            add(inner.r)
    return out


def _trait_bindings(t: TraitDecl, h: ImplHeader | None) -> dict:
    if h is None:
        return {p: Var(p) for p in t.type_params}
    if len(h.trait_args) != len(t.type_params):
        raise SynthesisError(
            f"`{t.name}` takes {len(t.type_params)} type argument(s) but the impl supplies {len(h.trait_args)}"
        )
    return dict(zip(t.type_params, h.trait_args))


def synthesize_meta_trait(
    t: TraitDecl,
    d: Disjunct,
    part: ParameterPartition,
    header: ImplHeader | None = None,
    taken: dict | None = None,
) -> TraitDecl:
    if not d.atoms:
        return t
    images = equality_images(d)
    substitution = Substitution(images)
    bindings = {p: apply_substitution(substitution, arg) for p, arg in _trait_bindings(t, header).items()}
    eq = part.eq_bound()
    kept: list[str] = []
    for p in t.type_params:
        for v in sorted(type_vars(bindings[p]), key=lambda v: render(bindings[p]).find(v)):
            if v not in eq and v not in kept:
                kept.append(v)
    lifetimes = list(t.lifetime_params)
    for lt in _lifetimes_of_disjunct(d, images):
        if lt.name not in lifetimes:
            lifetimes.append(lt.name)
    items = tuple(
        AssociatedItem(it.kind, it.name, substitute_tokens(it.signature, bindings), it.body, it.self_kind)
        for it in t.items
    )
    own_bounds = dict(t.param_bounds)
    if header is not None:
        own_bounds = {g: b for g, b in header.generics if b}
    bounds = tuple((p, tuple(own_bounds[p])) for p in kept if own_bounds.get(p))
    return TraitDecl(mangle_name(t.name, d, taken), tuple(kept), tuple(lifetimes), items, bounds)


def extract_impl(src: ImplSource, meta: TraitDecl, d: Disjunct, part: ParameterPartition) -> ExtractedImpl:
    h = src.header
    images = equality_images(d)
    substitution = Substitution(images)
    eq = part.eq_bound()
    trait_bounds: dict[str, list] = {}
    for a in d.atoms:
        if isinstance(a, TraitBound):
            trait_bounds.setdefault(a.param, []).extend(a.traits)
    folded = folded_outlives(d)
    for a in d.atoms:
        if isinstance(a, Outlives) and is_type_param(a.param) and a.param not in eq and a not in folded:
            trait_bounds.setdefault(a.param, []).append(str(a.lifetime))
    generics = []
    for name, declared in h.generics:
        if name in eq:
            continue
        bounds = list(declared or ())
        for b in trait_bounds.get(name, ()):
            if b not in bounds:
                bounds.append(b)
        generics.append((name, tuple(bounds) or None))
    lifetimes = list(meta.lifetime_params)
    for lt in h.lifetime_generics:
        if lt not in lifetimes:
            lifetimes.append(lt)
    args = [f"'{lt}" for lt in meta.lifetime_params] + list(meta.type_params)
    trait_ref = meta.name + (f"<{', '.join(args)}>" if args else "")
    header = ImplHeader(
        h.implementor_path,
        tuple(apply_substitution(substitution, a) for a in h.implementor_args),
        meta.name,
        tuple(Var(p) for p in meta.type_params),
        tuple(generics),
        tuple(lifetimes),
        substitute_tokens(h.where, images) if h.where else (),
    )
    items = []
    for it in src.items:
        sig = substitute_tokens(it.signature, images)
        items.append(AssociatedItem(it.kind, it.name, sig, it.body, it.self_kind))
    return ExtractedImpl(header, trait_ref, tuple(items))


# ---------------------------------------------------------------- registry


@dataclass
class MetaTraitEntry:
    decl: TraitDecl
    base: str
    disjunct: Disjunct


@dataclass
class ImplEntry:
    id: int
    base: str
    header: ImplHeader
    disjunct: Disjunct
    meta_trait: str
    slot_disjunct: Disjunct
    trait_slots: tuple
    self_slots: tuple
    renaming: dict
    extracted: ExtractedImpl | None = None
    span: tuple = (0, 0)
    method_bodies: dict = field(default_factory=dict)  # method name -> (start, end) offsets

    @property
    def is_default(self) -> bool:
        return not self.disjunct.atoms

    @property
    def label(self) -> str:
        return f"impl {self.meta_trait} for {render(self.header.implementor)}"


def slot_view(h: ImplHeader, t: TraitDecl, d: Disjunct, self_params: tuple | None = None):
    """Restate ``d`` over the trait's own parameter names (and the implementor's).

    Returns (disjunct, trait_slots, self_slots, renaming) where ``renaming``
    maps impl generics to slot names.
    """
    trait_slots = tuple(t.type_params) if t.type_params else tuple(f"T{i}" for i in range(len(h.trait_args)))
    if len(trait_slots) != len(h.trait_args):
        raise SynthesisError(f"`{t.name}` takes {len(trait_slots)} type argument(s), impl supplies {len(h.trait_args)}")
    renaming: dict[str, str] = {}
    extra: list[tuple[str, object]] = []
    for slot, arg in zip(trait_slots, h.trait_args):
        if isinstance(arg, Var) and arg.name not in renaming:
            renaming[arg.name] = slot
        else:
            extra.append((slot, arg))
    self_slots = []
    for j, arg in enumerate(h.implementor_args):
        if self_params and j < len(self_params):
            name = self_params[j]
        elif isinstance(arg, Var):
            name = arg.name
        else:
            name = f"Self{j}"
        if name in trait_slots and not (isinstance(arg, Var) and renaming.get(arg.name) == name):
            name = f"Self{j}"
        if isinstance(arg, Var) and arg.name not in renaming:
            renaming[arg.name] = name
        elif not (isinstance(arg, Var) and renaming.get(arg.name) == name):
            extra.append((name, arg))
        self_slots.append(name)
    tsub = Substitution({k: Var(v) for k, v in renaming.items()})

    def ren(a):
        if isinstance(a, Negated):
            return Negated(ren(a.inner))
        if isinstance(a, Equality):
            return Equality(renaming.get(a.param, a.param), apply_substitution(tsub, a.rhs))
        if isinstance(a, TraitBound):
            return TraitBound(renaming.get(a.param, a.param), a.traits)
        if isinstance(a, Outlives):
            return Outlives(renaming.get(a.param, a.param), a.lifetime)
        return a

    atoms = [ren(a) for a in d.atoms]
    atoms += [Equality(slot, apply_substitution(tsub, arg)) for slot, arg in extra]
    return Disjunct.of(atoms), trait_slots, tuple(self_slots), renaming


class SpecializationRegistry:
    """The sets of meta-traits (with the default trait) and implementations."""

    def __init__(self):
        self.meta_traits: dict[str, MetaTraitEntry] = {}
        self.impls: list[ImplEntry] = []
        self.base_traits: dict[str, TraitDecl] = {}
        self.sealed = False

    def _check_open(self):
        if self.sealed:
            raise SynthesisError("registry is sealed")

    def register_base(self, t: TraitDecl):
        self._check_open()
        self.base_traits[t.name] = t
        if t.name not in self.meta_traits:
            self.meta_traits[t.name] = MetaTraitEntry(t, t.name, Disjunct())

    def taken(self) -> dict:
        return {n: e.disjunct for n, e in self.meta_traits.items()}

    def add_meta_trait(self, decl: TraitDecl, base: str, d: Disjunct) -> TraitDecl:
        self._check_open()
        existing = self.meta_traits.get(decl.name)
        if existing is not None:
            if existing.decl == decl:
                return existing.decl
            decl = TraitDecl(f"{decl.name}_{_digest(base, d)}", decl.type_params, decl.lifetime_params, decl.items, decl.param_bounds)
        self.meta_traits[decl.name] = MetaTraitEntry(decl, base, d)
        return decl

    def add_impl(self, entry: ImplEntry):
        self._check_open()
        if entry.meta_trait not in self.meta_traits:
            raise SynthesisError(f"impl references unregistered trait `{entry.meta_trait}`")
        self.impls.append(entry)

    def seal(self) -> "SpecializationRegistry":
        self.sealed = True
        return self

    def specialized_names(self) -> set[str]:
        bases = {e.base for e in self.meta_traits.values() if e.disjunct.atoms}
        return bases | {n for n, e in self.meta_traits.items() if e.disjunct.atoms}

    def to_json(self) -> dict:
        return {
            "meta_traits": [
                {"name": n, "base": e.base, "disjunct": [str(a) for a in e.disjunct.atoms]}
                for n, e in self.meta_traits.items()
            ],
            "impls": [
                {
                    "implementor": render(i.header.implementor),
                    "meta_trait": i.meta_trait,
                    "disjunct": [str(a) for a in i.disjunct.atoms],
                }
                for i in self.impls
            ],
        }
