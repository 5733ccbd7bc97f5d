"""Source-level integration: annotations, markers, expansion and call rewriting."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .coherence import (
    CallSiteSpec,
    CoherenceError,
    Diagnostic,
    Resolution,
    check_overlaps,
    resolve_call_site,
)
from .predicate import CanonicalizationError, Disjunct, LifetimeEq, Outlives, canonicalize, check_disjunct_consistency
from .rust.items import FnItem, ImplItem, OtherItem, TraitItem, Unit, impl_types, parse_unit
from .rust.lexer import LexError, Token, join_tokens, tokenize
from .rust.parse import Cursor, ParseError, TypeParser, lifetime_of, parse_generics, parse_predicate
from .synthesis import (
    AssociatedItem,
    ImplEntry,
    ImplHeader,
    ImplSource,
    SpecializationRegistry,
    SynthesisError,
    TraitDecl,
    extract_impl,
    partition_parameters,
    slot_view,
    synthesize_meta_trait,
)
from .terms import Named, Static, free_lifetimes, is_lifetime, render


class ExpansionError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(d.message for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class AnnotationSite:
    kind: str  # "when" or "spec"
    tokens: tuple
    span: tuple  # byte range in the unit


@dataclass(frozen=True)
class RewrittenFragment:
    text: str
    provenance: AnnotationSite


@dataclass
class ExpansionResult:
    output: str
    registry: SpecializationRegistry
    resolutions: list = field(default_factory=list)  # (CallSiteSpec, Resolution)


def _syntax(err: ParseError | LexError) -> Diagnostic:
    if isinstance(err, LexError):
        return Diagnostic("MM0007", f"syntax error: {err}", (err.offset, err.offset))
    return Diagnostic("MM0007", f"syntax error: {err.message}", err.span)


# ---------------------------------------------------------------- annotations


def parse_when_attribute(tokens, type_vars=None):
    """Parse the contents of ``#[when(...)]`` into an uncanonicalized predicate."""
    return parse_predicate(list(tokens) if not isinstance(tokens, str) else tokens, type_vars)


def _split_top(toks: list[Token], sep: str, angles: bool = True) -> list[list[Token]]:
    """Split on ``sep`` outside any delimiter group (and angle brackets when ``angles``)."""
    opens = ("(", "[", "{", "<") if angles else ("(", "[", "{")
    closes = (")", "]", "}", ">") if angles else (")", "]", "}")
    out: list[list[Token]] = [[]]
    depth = 0
    for t in toks:
        if t.kind == "punct":
            if t.text in opens:
                depth += 1
            elif t.text in closes:
                depth -= 1
            elif t.text == sep and depth == 0:
                out.append([])
                continue
        out[-1].append(t)
    return out


def _split_args(toks: list[Token]) -> list[list[Token]]:
    """Split call arguments on commas, keeping closure parameter lists intact."""
    out: list[list[Token]] = []
    cur: list[Token] = []
    depth = 0
    in_closure_params = False
    for t in toks:
        if t.kind == "punct" and t.text == "|" and depth == 0:
            if in_closure_params:
                in_closure_params = False
            elif not [x for x in cur if x.text != "move"]:
                in_closure_params = True
        elif t.kind == "punct" and t.text in ("(", "[", "{"):
            depth += 1
        elif t.kind == "punct" and t.text in (")", "]", "}"):
            depth -= 1
        elif t.kind == "punct" and t.text == "," and depth == 0 and not in_closure_params:
            out.append(cur)
            cur = []
            continue
        cur.append(t)
    if cur:
        out.append(cur)
    return out


def _text(toks: list[Token], src: str | None) -> str:
    if not toks:
        return ""
    if src is not None and toks[0].start >= 0 and toks[-1].end >= 0:
        return src[toks[0].start : toks[-1].end]
    return join_tokens(toks)


def _parse_clause(toks: list[Token]):
    """``Type: Trait + Trait`` or a lifetime fact ``'a: 'b`` / ``'a = 'b``."""
    cur = Cursor(toks)
    first = cur.peek()
    if first is not None and first.kind == "lifetime":
        cur.next()
        lhs = lifetime_of(first)
        if cur.eat("="):
            r = cur.next()
            if r.kind != "lifetime":
                raise ParseError("expected a lifetime", (r.start, r.end))
            fact = LifetimeEq(lhs, lifetime_of(r))
        else:
            cur.expect(":")
            r = cur.next()
            if r.kind != "lifetime":
                raise ParseError("expected a lifetime", (r.start, r.end))
            fact = Outlives(first.text, lifetime_of(r))
        if not cur.done():
            raise ParseError(f"unexpected {cur.peek().text!r} in lifetime fact", cur.span_here())
        return "lifetime", fact
    tp = TypeParser(cur)
    ty = tp.parse()
    cur.expect(":")
    bounds = tp.bounds()
    if not cur.done():
        raise ParseError(f"unexpected {cur.peek().text!r} in trait clause", cur.span_here())
    traits = tuple(b for b in bounds if isinstance(b, str))
    lts = [b for b in bounds if not isinstance(b, str)]
    return "trait", (ty, traits, lts)


def parse_spec_marker(tokens, src: str | None = None, span: tuple | None = None) -> CallSiteSpec:
    """Parse the body of ``spec! { call; Receiver; [bounds]; clauses }``."""
    if isinstance(tokens, str):
        src = tokens
        tokens = tokenize(tokens)
    toks = list(tokens)
    sections = _split_top(toks, ";", angles=False)
    while sections and not sections[-1]:
        sections.pop()
    here = span or ((toks[0].start, toks[-1].end) if toks else (0, 0))
    if len(sections) < 2 or not sections[1]:
        raise ParseError("marker needs a receiver type after the call expression", here)
    if len(sections) < 3 or not sections[2]:
        raise ParseError("marker needs a bound list `[...]` after the receiver type", here)
    call, recv_toks, bound_toks = sections[0], sections[1], sections[2]
    # call expression: receiver . method ( args )
    if len(call) < 4 or not call[-1].is_(")"):
        raise ParseError("malformed call expression: expected `receiver.method(args)`", here)
    depth, open_ = 0, -1
    for k in range(len(call) - 1, -1, -1):
        if call[k].is_(")"):
            depth += 1
        elif call[k].is_("("):
            depth -= 1
            if depth == 0:
                open_ = k
                break
    if open_ < 3 or call[open_ - 1].kind != "ident" or not call[open_ - 2].is_("."):
        raise ParseError("malformed call expression: expected `receiver.method(args)`", here)
    receiver = _text(call[: open_ - 2], src)
    method = call[open_ - 1].text
    args = tuple(_text(a, src) for a in _split_args(call[open_ + 1 : -1]))
    cur = Cursor(recv_toks)
    receiver_type = TypeParser(cur).parse()
    if not cur.done():
        raise ParseError(f"unexpected {cur.peek().text!r} after receiver type", cur.span_here())
    if not (bound_toks[0].is_("[") and bound_toks[-1].is_("]")):
        raise ParseError("bound list must be enclosed in `[...]`", here)
    bounds = []
    for part in _split_top(bound_toks[1:-1], ","):
        if not part:
            continue
        cur = Cursor(part)
        bounds.append(TypeParser(cur, allow_wildcard=True).parse())
        if not cur.done():
            raise ParseError(f"unexpected {cur.peek().text!r} in bound list", cur.span_here())
    trait_bounds, facts = [], []
    for sec in sections[3:]:
        for clause in _split_top(sec, ","):
            if not clause:
                continue
            kind, val = _parse_clause(clause)
            if kind == "lifetime":
                facts.append(val)
            else:
                ty, traits, lts = val
                if traits:
                    trait_bounds.append((ty, traits))
                for lt in free_lifetimes(ty):
                    facts.extend(Outlives(str(lt), b) for b in lts)
    return CallSiteSpec(receiver, method, args, receiver_type, tuple(bounds), tuple(trait_bounds), tuple(facts), here)


# ---------------------------------------------------------------- rewriting


def _lt_arg(lt) -> str:
    if isinstance(lt, Static):
        return "'static"
    if isinstance(lt, Named) and not lt.name.startswith("#") and lt.name != "_":
        return str(lt)
    return "'_"


def _self_prefix(kind: str) -> str:
    return {"&self": "&", "&mut self": "&mut ", "self": ""}.get(kind, "&")


def rewrite_call_site(cs: CallSiteSpec, r: Resolution, reg: SpecializationRegistry, site: AnnotationSite | None = None) -> RewrittenFragment:
    base = reg.base_traits[r.trait]
    method = base.method(cs.method_name)
    prefix = _self_prefix(method.self_kind if method is not None else "&self")
    if r.kind == "Specialized":
        e = r.impl
        meta = reg.meta_traits[e.meta_trait].decl
        args = [_lt_arg(r.substitution.lifetimes.get(Named(lt), Named("_"))) for lt in meta.lifetime_params]
        for g in meta.type_params:
            slot = e.renaming.get(g, g)
            t = r.substitution.types.get(slot)
            args.append(render(t) if t is not None else "_")
        name = meta.name
    else:
        args = ["'_" for _ in base.lifetime_params] + [render(b) for b in cs.bounds]
        name = base.name
    trait_ref = name + (f"<{', '.join(args)}>" if args else "")
    call_args = [f"{prefix}{cs.receiver_var}"] + list(cs.args)
    text = f"<{render(cs.receiver_type)} as {trait_ref}>::{cs.method_name}({', '.join(call_args)})"
    return RewrittenFragment(text, site or AnnotationSite("spec", (), cs.span))


# ---------------------------------------------------------------- unit scanning


def _trait_decl(unit: Unit, it: TraitItem) -> TraitDecl:
    tps = tuple(g.name for g in it.generics if g.kind == "type")
    lts = tuple(g.name for g in it.generics if g.kind == "lifetime")
    bounds = tuple((g.name, tuple(b if isinstance(b, str) else str(b) for b in g.bounds)) for g in it.generics if g.kind == "type" and g.bounds)
    items = [_assoc_item(unit, f) for f in it.fns] + [_assoc_other(unit, o) for o in it.others]
    return TraitDecl(it.name, tps, lts, tuple(items), bounds)


def _assoc_item(unit: Unit, f: FnItem, marker_edits=None) -> AssociatedItem:
    sig = tuple(unit.toks[f.sig[0] : f.sig[1] + 1])
    body = None
    if f.body is not None:
        a, b = unit.toks[f.body[0]].start, unit.toks[f.body[1]].end
        body = _splice(unit.src, a, b, marker_edits or [])
    kind = f.params[0].self_kind if f.params and f.params[0].is_self else ""
    return AssociatedItem("fn", f.name, sig, body, kind)


def _assoc_other(unit: Unit, o) -> AssociatedItem:
    toks = unit.toks[o.start : o.end + 1]
    while toks and toks[0].is_("#"):
        close = unit.pairs[unit.toks.index(toks[1])] if toks[1].is_("[") else None
        if close is None:
            break
        toks = unit.toks[close + 1 : o.end + 1]
    if toks and toks[-1].is_(";"):
        toks = toks[:-1]
    kind = "type" if any(t.is_("type") for t in toks[:3]) else "const"
    name = next((toks[k + 1].text for k, t in enumerate(toks[:-1]) if t.is_(kind)), "")
    return AssociatedItem(kind, name, tuple(toks))


def _struct_params(unit: Unit) -> dict:
    out = {}
    for it, _ in unit.walk():
        if isinstance(it, OtherItem) and it.kind in ("struct", "enum", "union"):
            k = it.start
            while k <= it.end and not (unit.toks[k].kind == "ident" and unit.toks[k].text == it.kind):
                k += 1
            if k + 1 > it.end:
                continue
            name = unit.toks[k + 1].text
            cur = Cursor(unit.toks, k + 2, it.end + 1)
            try:
                gens = parse_generics(cur)
            except ParseError:
                continue
            out[name] = tuple(g.name for g in gens if g.kind == "type")
    return out


def _impl_header(unit: Unit, it: ImplItem) -> ImplHeader:
    trait, self_ty = impl_types(unit, it)
    generics = []
    for g in it.generics:
        if g.kind == "type":
            b = tuple(x if isinstance(x, str) else str(x) for x in g.bounds)
            generics.append((g.name, b or None))
    lifetimes = tuple(g.name for g in it.generics if g.kind == "lifetime")
    where = tuple(unit.toks[it.where_range[0] : it.where_range[1] + 1]) if it.where_range else ()
    targs = tuple(a for a in trait.args if not is_lifetime(a))
    path = getattr(self_ty, "path", render(self_ty))
    sargs = tuple(getattr(self_ty, "args", ()))
    return ImplHeader(path, sargs, trait.path, targs, tuple(generics), lifetimes, where)


def _markers(unit: Unit) -> list[tuple[int, int, int]]:
    """(index of `spec`, index of the opening delimiter, index of its close)."""
    out = []
    toks = unit.toks
    for k in range(len(toks) - 2):
        if toks[k].kind == "ident" and toks[k].text == "spec" and toks[k + 1].is_("!") and toks[k + 2].text in ("{", "(", "["):
            if k > 0 and (toks[k - 1].is_("macro_rules") or toks[k - 1].is_("!")):
                continue
            out.append((k, k + 2, unit.pairs[k + 2]))
    return out


def _splice(src: str, a: int, b: int, edits: list) -> str:
    """``src[a:b]`` with the non-overlapping ``(start, end, text)`` edits inside it applied."""
    parts, pos = [], a
    for s, e, text in sorted(x for x in edits if a <= x[0] and x[1] <= b):
        parts.append(src[pos:s])
        parts.append(text)
        pos = e
    parts.append(src[pos:b])
    return "".join(parts)


def _line_start(src: str, off: int) -> int:
    return src.rfind("\n", 0, off) + 1


def _indent(src: str, off: int) -> str:
    ls = _line_start(src, off)
    seg = src[ls:off]
    return seg if seg.strip() == "" else ""


def _removal_range(src: str, a: int, b: int) -> tuple[int, int]:
    """Extend an item's byte range to whole lines when it sits on lines of its own."""
    ls = _line_start(src, a)
    nl = src.find("\n", b)
    le = len(src) if nl < 0 else nl + 1
    if src[ls:a].strip() == "" and src[b:le].strip() == "":
        # swallow one trailing blank line when the item was set off by blank lines
        before_blank = ls == 0 or src[_line_start(src, ls - 1) : ls].strip() == ""
        nl2 = src.find("\n", le)
        if before_blank and nl2 >= 0 and src[le:nl2].strip() == "":
            le = nl2 + 1
        return ls, le
    return a, b


# ---------------------------------------------------------------- expansion


@dataclass
class _Annotated:
    item: ImplItem
    header: ImplHeader
    attr: object
    trait: str


def detect_unsupported_positions(unit: Unit, reg: SpecializationRegistry, resolved=()) -> list[Diagnostic]:
    """Specialized traits in `impl Trait`/`dyn Trait` positions, and self-recursive markers."""
    names = reg.specialized_names()
    out: list[Diagnostic] = []
    toks = unit.toks
    item_impls = {it.impl_tok for it, _ in unit.walk() if isinstance(it, ImplItem)}
    type_pos_prev = {"->", ":", "(", ",", "<", "&", "&&", "=", "mut", "[", "*", "dyn", "+"}
    for k, t in enumerate(toks):
        if t.kind != "ident" or t.text not in ("impl", "dyn"):
            continue
        if t.text == "impl" and (k in item_impls or k == 0 or toks[k - 1].text not in type_pos_prev):
            continue
        depth = 0
        j = k + 1
        while j < len(toks):
            x = toks[j]
            if x.text in ("<", "(", "["):
                depth += 1
            elif x.text in (">", ")", "]"):
                if depth == 0:
                    break
                depth -= 1
            elif depth == 0 and x.text in (",", "{", ";", "=", "where"):
                break
            if depth == 0 and x.kind == "ident" and x.text in names:
                what = "an opaque `impl` type" if t.text == "impl" else "a `dyn` trait object"
                out.append(
                    Diagnostic(
                        "MM0003",
                        f"specialized trait `{x.text}` used in {what}",
                        (t.start, x.end),
                        ("specializations are chosen per call site and cannot be selected through an existential type",),
                    )
                )
                break
            j += 1
    for cs, r in resolved:
        entries = [e for e in reg.impls if e.base == r.trait]
        for e in entries:
            rng = e.method_bodies.get(cs.method_name)
            if rng and rng[0] <= cs.span[0] and cs.span[1] <= rng[1]:
                out.append(
                    Diagnostic(
                        "MM0003",
                        f"specialized call to `{cs.method_name}` inside its own implementation",
                        cs.span,
                        ("polymorphic recursion through a specialization is not supported",),
                    )
                )
                break
    return out


def expand_program(src: str, max_disjuncts: int = 256, max_atoms: int = 64) -> ExpansionResult:
    """Expand every ``#[when]`` impl and ``spec!`` marker in one compilation unit.

    Raises :class:`ExpansionError` carrying all diagnostics when anything fails.
    """
    try:
        unit = parse_unit(src)
    except (ParseError, LexError) as err:
        raise ExpansionError([_syntax(err)]) from None
    diags: list[Diagnostic] = []
    reg = SpecializationRegistry()
    traits: dict[str, TraitItem] = {}
    impls: list[ImplItem] = []
    for it, _ in unit.walk():
        if isinstance(it, TraitItem):
            traits.setdefault(it.name, it)
        elif isinstance(it, ImplItem) and it.is_trait_impl:
            impls.append(it)
    markers = _markers(unit)
    annotated: list[_Annotated] = []
    plain: list[tuple[ImplItem, ImplHeader]] = []
    for it in impls:
        whens = [a for a in it.attrs if a.name == "when"]
        try:
            header = _impl_header(unit, it)
        except ParseError as err:
            if whens:
                diags.append(_syntax(err))
            continue
        if len(whens) > 1:
            diags.append(Diagnostic("MM0007", "an impl may carry at most one `#[when]` attribute", (unit.toks[whens[1].start].start, unit.toks[whens[1].end].end)))
            continue
        if whens:
            annotated.append(_Annotated(it, header, whens[0], header.trait_name))
        else:
            plain.append((it, header))
    if not annotated and not markers:
        return ExpansionResult(src, reg.seal())

    decls = {n: _trait_decl(unit, t) for n, t in traits.items()}
    for n in decls:
        reg.register_base(decls[n])
    structs = _struct_params(unit)
    entries_src: list[tuple[_Annotated, list]] = []
    next_id = itertools.count()

    def method_bodies(it: ImplItem) -> dict:
        return {
            f.name: (unit.toks[f.body[0]].start, unit.toks[f.body[1]].end) for f in it.fns if f.body is not None
        }

    def attr_span(a):
        return (unit.toks[a.start].start, unit.toks[a.end].end)

    specialized_bases = {a.trait for a in annotated}
    for it, header in plain:
        if header.trait_name in specialized_bases and header.trait_name in decls:
            try:
                d, ts, ss, ren = slot_view(header, decls[header.trait_name], Disjunct(), structs.get(header.implementor_path))
            except SynthesisError as err:
                diags.append(Diagnostic("MM0005", str(err), (unit.toks[it.start].start, unit.toks[it.end].end)))
                continue
            reg.add_impl(
                ImplEntry(
                    next(next_id), header.trait_name, header, Disjunct(), header.trait_name, d, ts, ss, ren,
                    None, (unit.toks[it.start].start, unit.toks[it.end].end), method_bodies(it),
                )
            )
    for ann in annotated:
        it, header = ann.item, ann.header
        span = attr_span(ann.attr)
        if ann.trait not in decls:
            diags.append(Diagnostic("MM0005", f"trait `{ann.trait}` must be declared in the same compilation unit as its specializations", span))
            continue
        t = decls[ann.trait]
        if ann.attr.args is None:
            diags.append(Diagnostic("MM0007", "syntax error: `#[when]` needs a predicate", span))
            continue
        a, b = ann.attr.args
        try:
            pred = parse_when_attribute(unit.toks[a : b + 1], header.generic_names())
            canon = canonicalize(pred, max_disjuncts, max_atoms)
        except ParseError as err:
            diags.append(_syntax(err))
            continue
        except CanonicalizationError as err:
            diags.append(Diagnostic("MM0004", f"specialization bound too large: {err}", span))
            continue
        made = []
        for d in canon.disjuncts:
            rep = check_disjunct_consistency(d)
            if not rep.ok:
                x, y = rep.pair
                diags.append(Diagnostic("MM0004", "contradictory specialization bound", span, (f"`{x}` conflicts with `{y}`",)))
                continue
            try:
                part = partition_parameters(t, header, d)
                meta = synthesize_meta_trait(t, d, part, header, reg.taken())
                meta = reg.add_meta_trait(meta, t.name, d)
                src_impl = ImplSource(header, ())
                ext = extract_impl(src_impl, meta, d, part)
                sd, ts, ss, ren = slot_view(header, t, d, structs.get(header.implementor_path))
            except SynthesisError as err:
                diags.append(Diagnostic("MM0005", str(err), span))
                continue
            entry = ImplEntry(
                next(next_id), t.name, header, d, meta.name, sd, ts, ss, ren, ext,
                (unit.toks[it.start].start, unit.toks[it.end].end), method_bodies(it),
            )
            reg.add_impl(entry)
            made.append((entry, d, part, meta))
        entries_src.append((ann, made))
    reg.seal()

    for ov in check_overlaps(reg):
        if ov.verdict == "Forbidden":
            diags.append(ov.diagnostic())

    resolved = []
    replacements = []
    fresh = itertools.count()
    for k, open_, close in markers:
        start, end = unit.toks[k].start, unit.toks[close].end
        site = AnnotationSite("spec", tuple(unit.toks[open_ + 1 : close]), (start, end))
        try:
            cs = parse_spec_marker(unit.toks[open_ + 1 : close], src, (start, end))
            r = resolve_call_site(cs, reg, fresh)
        except ParseError as err:
            diags.append(_syntax(err))
            continue
        except CoherenceError as err:
            diags.append(err.diagnostic)
            continue
        resolved.append((cs, r))
        frag = rewrite_call_site(cs, r, reg, site)
        text = frag.text
        if unit.toks[open_].text == "{" and not (close + 1 < len(unit.toks) and unit.toks[close + 1].is_(";")):
            text += ";"
        replacements.append((start, end, text))

    diags.extend(detect_unsupported_positions(unit, reg, resolved))
    if diags:
        raise ExpansionError(sorted(diags, key=lambda d: (d.span, d.code)))

    edits = list(replacements)
    # annotated impls are removed, their expansions inserted after the base trait's impls
    by_trait: dict[str, list[str]] = {}
    anchor_for: dict[str, int] = {}
    for ann, made in entries_src:
        it = ann.item
        a, b = _removal_range(src, unit.toks[it.start].start, unit.toks[it.end].end)
        edits.append((a, b, ""))
        items = [_assoc_item(unit, f, replacements) for f in it.fns] + [_assoc_other(unit, o) for o in it.others]
        for entry, d, part, meta in made:
            ext = extract_impl(ImplSource(ann.header, tuple(items)), meta, d, part)
            entry.extracted = ext
            by_trait.setdefault(ann.trait, []).append(ext.render())
        if ann.trait not in anchor_for:
            last_plain = [p for p, h in plain if h.trait_name == ann.trait]
            if last_plain:
                anchor_for[ann.trait] = _line_end(src, unit.toks[last_plain[-1].end].end)
            else:
                anchor_for[ann.trait] = a
    inserts = []
    for name, t in traits.items():
        metas = [e.decl for e in reg.meta_traits.values() if e.base == name and e.disjunct.atoms]
        if not metas:
            continue
        at = _line_end(src, unit.toks[t.end].end)
        ind = _indent(src, unit.toks[t.start].start)
        inserts.append((at, _block([m.render() for m in metas], ind, at, src)))
    for name, blocks in by_trait.items():
        at = anchor_for[name]
        trait_item = traits[name]
        ind = _indent(src, unit.toks[trait_item.start].start)
        inserts.append((at, _block(blocks, ind, at, src)))
    for at, text in inserts:
        edits.append((at, at, text))
    # stable: removals and replacements at distinct offsets; inserts keep their order
    edits.sort(key=lambda e: (e[0], e[1] > e[0]))
    out = _apply_edits(src, edits)
    return ExpansionResult(out, reg, resolved)


def _line_end(src: str, off: int) -> int:
    nl = src.find("\n", off)
    return len(src) if nl < 0 else nl + 1


def _block(blocks: list[str], ind: str, at: int, src: str) -> str:
    body = "\n".join("\n".join(ind + line if line else line for line in b.split("\n")) for b in blocks)
    needs_nl = at > 0 and src[at - 1] != "\n"
    return ("\n" if needs_nl else "") + "\n" + body + "\n"


def _apply_edits(src: str, edits: list) -> str:
    parts, pos = [], 0
    for s, e, text in edits:
        if s < pos:
            s = pos
        parts.append(src[pos:s])
        parts.append(text)
        pos = max(pos, e)
    parts.append(src[pos:])
    return "".join(parts)
