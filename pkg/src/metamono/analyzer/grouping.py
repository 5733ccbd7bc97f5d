"""Name-based grouping, similarity scoring and candidate groups."""

from __future__ import annotations

from dataclasses import dataclass

from .records import FnKind, FunctionRecord
from .ted import TreeTooLarge, tree_edit_distance

TYPE_SUFFIXES = (
    "i8", "i16", "i32", "i64", "i128", "isize",
    "u8", "u16", "u32", "u64", "u128", "usize",
    "f32", "f64", "bool", "char", "str", "string", "vec", "slice",
)
NAME_SIMILARITY = 0.6


def stem(name: str, suffixes=TYPE_SUFFIXES) -> str:
    """Lower-cased name with trailing type-suffix tokens removed (`process_i32` -> `process`)."""
    parts = name.lower().split("_")
    while len(parts) > 1 and parts[-1] in suffixes:
        parts.pop()
    return "_".join(parts).strip("_") or name.lower()


def has_type_suffix(name: str, suffixes=TYPE_SUFFIXES) -> bool:
    return stem(name, suffixes) != name.lower()


def levenshtein(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def name_similarity(a: str, b: str, suffixes=TYPE_SUFFIXES) -> float:
    sa, sb = stem(a, suffixes), stem(b, suffixes)
    longest = max(len(sa), len(sb))
    return 1.0 if longest == 0 else 1 - levenshtein(sa, sb) / longest


def _shared_trait(a: FunctionRecord, b: FunctionRecord) -> bool:
    return (
        a.kind in (FnKind.TraitFn, FnKind.TraitImplFn)
        and b.kind in (FnKind.TraitFn, FnKind.TraitImplFn)
        and a.trait_name is not None
        and a.trait_name == b.trait_name
    )


def compatible(a: FunctionRecord, b: FunctionRecord, name_sim: float = NAME_SIMILARITY, suffixes=TYPE_SUFFIXES) -> bool:
    if a.arity != b.arity:
        return False
    return name_similarity(a.name, b.name, suffixes) >= name_sim or _shared_trait(a, b)


def group_candidates(records, name_sim: float = NAME_SIMILARITY, suffixes=TYPE_SUFFIXES) -> list[tuple[str, list]]:
    """Connected components of the compatibility relation, with their common stem.

    Singletons are dropped; order follows the records.
    """
    n = len(records)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_arity: dict[int, list[int]] = {}
    for i, r in enumerate(records):
        by_arity.setdefault(r.arity, []).append(i)
    for idx in by_arity.values():
        for x in range(len(idx)):
            for y in range(x + 1, len(idx)):
                i, j = idx[x], idx[y]
                if find(i) != find(j) and compatible(records[i], records[j], name_sim, suffixes):
                    parent[find(i)] = find(j)
    comps: dict[int, list[int]] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    out = []
    for members in sorted(comps.values(), key=lambda m: m[0]):
        if len(members) < 2:
            continue
        stems = sorted(stem(records[i].name, suffixes) for i in members)
        common = max(set(stems), key=lambda s: (stems.count(s), -len(s), s))
        out.append((common, [records[i] for i in members]))
    return out


@dataclass(frozen=True)
class PairScore:
    a: int
    b: int
    ted: int | None
    sim: float | None
    pruned: bool
    skipped: bool = False


def similarity_score(a, b, threshold: float, max_nodes: int = 20_000) -> PairScore:
    """Normalized similarity of two trees, pruned when the size ratio already rules it out."""
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    na, nb = len(a), len(b)
    if min(na, nb) / max(na, nb) < threshold:
        return PairScore(0, 0, None, None, True)
    try:
        ted = tree_edit_distance(a, b, max_nodes)
    except TreeTooLarge:
        return PairScore(0, 0, None, None, False, True)
    # unit-cost distance can exceed the larger size (relabel plus restructure), so clamp at 0
    return PairScore(0, 0, ted, max(0.0, 1 - ted / max(na, nb)), False)


def score_group(trees: list, threshold: float, max_nodes: int = 20_000) -> list[PairScore]:
    out = []
    for i in range(len(trees)):
        for j in range(i + 1, len(trees)):
            s = similarity_score(trees[i], trees[j], threshold, max_nodes)
            out.append(PairScore(i, j, s.ted, s.sim, s.pruned, s.skipped))
    return out


def cliques(n: int, scores: list[PairScore], threshold: float) -> list[list[int]]:
    """Greedy pairwise cliques over pairs meeting ``threshold`` (members in index order)."""
    ok = {(s.a, s.b) for s in scores if s.sim is not None and s.sim >= threshold}
    edge = lambda i, j: (min(i, j), max(i, j)) in ok  # noqa: E731
    used: set = set()
    out = []
    for i in range(n):
        if i in used:
            continue
        clique = [i]
        for j in range(i + 1, n):
            if j not in used and all(edge(j, k) for k in clique):
                clique.append(j)
        if len(clique) >= 2:
            used.update(clique)
            out.append(clique)
    return out
