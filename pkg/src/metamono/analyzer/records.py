"""Function records extracted from Rust sources."""

from __future__ import annotations

import enum
import logging
import os
from dataclasses import dataclass, field

from ..rust.items import FnItem, ImplItem, TraitItem, Unit, parse_unit
from ..rust.lexer import LexError, join_tokens
from ..rust.parse import Cursor, ParseError, TypeParser
from ..terms import ANON, Ref, Var
from .trees import LabeledTree, token_forest

log = logging.getLogger(__name__)


class FnKind(enum.Enum):
    Bare = "Bare"
    TraitFn = "TraitFn"
    TraitImplFn = "TraitImplFn"
    InherentImplFn = "InherentImplFn"


@dataclass
class FunctionRecord:
    name: str
    arity: int
    param_kinds: tuple  # coarse, abstracted type text per parameter
    kind: FnKind
    tree: LabeledTree
    source_span: tuple  # (path, start byte, end byte)
    param_types: tuple = ()  # parsed type terms, None where unparseable
    generics: tuple = ()
    trait_name: str | None = None
    self_type: str | None = None
    container: int | None = None  # id of the enclosing trait or impl block
    body_idents: frozenset = field(default_factory=frozenset)
    calls: frozenset = field(default_factory=frozenset)

    @property
    def key(self) -> tuple:
        return (self.source_span[0], self.source_span[1], self.name)


def _type_text(unit: Unit, rng) -> str:
    a, b = rng
    return join_tokens(unit.toks[a : b + 1])


def _parse_type(unit: Unit, rng, names):
    a, b = rng
    cur = Cursor(unit.toks, a, b + 1)
    try:
        t = TypeParser(cur, names).parse()
    except (ParseError, IndexError):
        return None
    return t if cur.done() else None


def _self_term(unit: Unit, container, names):
    if isinstance(container, ImplItem):
        return _parse_type(unit, container.self_range, names)
    return Var("Self")


def _function_tree(unit: Unit, f: FnItem, type_names: frozenset) -> LabeledTree:
    toks, pairs = unit.toks, unit.pairs
    params = []
    for p in f.params:
        a, b = p.pattern
        kids = token_forest(toks, pairs, a, b + 1, type_names)
        if p.ty is not None:
            kids.append(("type", token_forest(toks, pairs, p.ty[0], p.ty[1] + 1, type_names)))
        params.append(("param", kids))
    kids = [("params", params)]
    # return type sits between the parameter list and the body or where clause
    close = next(k for k in range(f.name_tok, f.sig[1] + 1) if toks[k].is_("("))
    close = pairs[close]
    k = close + 1
    if k <= f.sig[1] and toks[k].is_("->"):
        end = k + 1
        while end <= f.sig[1] and not toks[end].is_("where"):
            end = pairs.get(end, end) + 1 if toks[end].text in ("(", "[") else end + 1
        kids.append(("ret", token_forest(toks, pairs, k + 1, min(end, f.sig[1] + 1), type_names)))
    if f.body is not None:
        kids.append(token_forest(toks, pairs, f.body[0], f.body[1] + 1, type_names)[0])
    return LabeledTree.from_nested(("fn", kids))


def _called_names(unit: Unit, f: FnItem) -> tuple[frozenset, frozenset]:
    if f.body is None:
        return frozenset(), frozenset()
    toks = unit.toks[f.body[0] : f.body[1] + 1]
    idents = frozenset(t.text for t in toks if t.kind == "ident")
    calls = set()
    for k in range(len(toks) - 1):
        if toks[k].kind == "ident" and (toks[k + 1].is_("(") or (toks[k + 1].is_("::") and k + 2 < len(toks) and toks[k + 2].is_("<"))):
            calls.add(toks[k].text)
    return idents, frozenset(calls)


def records_from_unit(unit: Unit, path: str) -> tuple[list[FunctionRecord], int]:
    """Function records and the number of trait declarations in ``unit``."""
    out: list[FunctionRecord] = []
    traits = 0
    for container_id, (it, _) in enumerate(unit.walk()):
        if isinstance(it, FnItem):
            out.append(_record(unit, path, it, FnKind.Bare, None, None))
        elif isinstance(it, TraitItem):
            traits += 1
            for f in it.fns:
                out.append(_record(unit, path, f, FnKind.TraitFn, it, container_id))
        elif isinstance(it, ImplItem):
            kind = FnKind.TraitImplFn if it.is_trait_impl else FnKind.InherentImplFn
            for f in it.fns:
                out.append(_record(unit, path, f, kind, it, container_id))
    return out, traits


def _record(unit: Unit, path: str, f: FnItem, kind: FnKind, container, cid) -> FunctionRecord:
    outer = [g for g in getattr(container, "generics", [])]
    names = {g.name for g in f.generics + outer if g.kind == "type"}
    type_names = frozenset(names | {"Self"})
    kinds, types = [], []
    self_t = _self_term(unit, container, names)
    for p in f.params:
        if p.is_self and p.ty is None:
            kinds.append(p.self_kind)
            if self_t is None:
                types.append(None)
            elif p.self_kind.startswith("&"):
                types.append(Ref(ANON, "mut" in p.self_kind, self_t))
            else:
                types.append(self_t)
        elif p.ty is not None:
            kinds.append(_type_text(unit, p.ty))
            types.append(_parse_type(unit, p.ty, names))
        else:
            kinds.append("_")
            types.append(None)
    trait_name = None
    self_type = None
    if isinstance(container, TraitItem):
        trait_name = container.name
    elif isinstance(container, ImplItem):
        if container.trait_range is not None:
            a, b = container.trait_range
            # the last path segment before any generic arguments names the trait
            segs = []
            for t in unit.toks[a : b + 1]:
                if t.is_("<"):
                    break
                if t.kind == "ident":
                    segs.append(t.text)
            trait_name = segs[-1] if segs else None
        self_type = _type_text(unit, container.self_range)
    start, end = unit.toks[f.start].start, unit.toks[f.end].end
    idents, calls = _called_names(unit, f)
    return FunctionRecord(
        f.name,
        len(f.params),
        tuple(kinds),
        kind,
        _function_tree(unit, f, type_names),
        (path, start, end),
        tuple(types),
        tuple(sorted(names)),
        trait_name,
        self_type,
        cid,
        idents,
        calls,
    )


def rust_files(path: str) -> list[str]:
    if os.path.isfile(path):
        return [path]
    found = []
    for root, dirs, files in os.walk(path):
        dirs[:] = sorted(d for d in dirs if d not in ("target", ".git"))
        found += [os.path.join(root, f) for f in sorted(files) if f.endswith(".rs")]
    return found


@dataclass
class ProjectRecords:
    records: list
    traits: int
    files: int
    parsed: int
    skipped: list


def build_function_records(paths: list[str]) -> ProjectRecords:
    """Parse every ``.rs`` file under ``paths``; unparseable files are skipped with a warning."""
    records: list[FunctionRecord] = []
    traits = files = parsed = 0
    skipped = []
    for p in paths:
        for fpath in rust_files(p):
            files += 1
            try:
                with open(fpath, encoding="utf-8") as fh:
                    src = fh.read()
                unit = parse_unit(src)
                recs, nt = records_from_unit(unit, fpath)
            except (OSError, UnicodeDecodeError) as err:
                log.warning("cannot read %s: %s", fpath, err)
                skipped.append(fpath)
                continue
            except (ParseError, LexError, KeyError, IndexError, StopIteration) as err:
                log.warning("skipping %s: %s", fpath, err)
                skipped.append(fpath)
                continue
            parsed += 1
            traits += nt
            records.extend(recs)
    return ProjectRecords(records, traits, files, parsed, skipped)
