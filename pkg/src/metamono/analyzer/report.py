"""Corpus analysis driver and JSON/CSV report emission."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .classify import Pattern, classify_pattern, classify_specializability, dispatch_evidence
from .grouping import NAME_SIMILARITY, TYPE_SUFFIXES, cliques, group_candidates, score_group
from .records import FnKind, build_function_records

SCHEMA = 1
KIND_COLUMNS = [("bare", FnKind.Bare), ("trait_fn", FnKind.TraitFn), ("trait_impl_fn", FnKind.TraitImplFn), ("inherent_impl_fn", FnKind.InherentImplFn)]
PATTERN_COLUMNS = [
    ("selection_in_trait", Pattern.SelectionInTrait),
    ("manual_monomorphized_traits", Pattern.ManualMonomorphizedTraits),
    ("caller_selected_functions", Pattern.CallerSelectedFunctions),
    ("inherent_per_variant", Pattern.InherentPerVariant),
    ("no_pattern", Pattern.NoPattern),
]
CSV_COLUMNS = (
    ["project", "threshold", "functions", "traits", "specializable", "percent", "already", "newly"]
    + [c for c, _ in KIND_COLUMNS]
    + [c for c, _ in PATTERN_COLUMNS]
    + ["seconds"]
)


@dataclass
class CandidateGroup:
    members: list
    pattern: Pattern
    specializability: object
    min_similarity: float
    evidence: dict


def _peak_rss_kb():
    try:
        import resource
    except ImportError:
        return None
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss


def _score_job(args):
    trees, threshold, max_nodes = args
    return score_group(trees, threshold, max_nodes)


def analyze_project(path: str, thresholds, name_sim: float = NAME_SIMILARITY, max_nodes: int = 20_000, jobs: int = 1, suffixes=TYPE_SUFFIXES) -> dict:
    t0 = time.perf_counter()
    proj = build_function_records([path])
    records = proj.records
    comps = group_candidates(records, name_sim, suffixes) if records else []
    lowest = min(thresholds)
    work = [([m.tree for m in members], lowest, max_nodes) for _, members in comps]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(_score_job, work))
    else:
        scores = [_score_job(w) for w in work]
    skipped_pairs = sum(1 for sc in scores for s in sc if s.skipped)
    results = []
    for t in sorted(thresholds):
        groups: list[CandidateGroup] = []
        for (_, members), sc in zip(comps, scores):
            for clique in cliques(len(members), sc, t):
                ms = [members[i] for i in clique]
                sims = [s.sim for s in sc if s.a in clique and s.b in clique]
                groups.append(
                    CandidateGroup(ms, classify_pattern(ms, suffixes), classify_specializability(ms), min(sims), dispatch_evidence(ms, records))
                )
        results.append(_threshold_block(t, groups, len(records)))
    elapsed = time.perf_counter() - t0
    kinds_all = {c: sum(1 for r in records if r.kind is k) for c, k in KIND_COLUMNS}
    return {
        "project": path,
        "files": proj.files,
        "parsed_files": proj.parsed,
        "skipped_files": proj.skipped,
        "functions": len(records),
        "traits": proj.traits,
        "function_kinds": kinds_all,
        "skipped_pairs": skipped_pairs,
        "results": results,
        "seconds": round(elapsed, 6),
        "peak_rss_kb": _peak_rss_kb(),
    }


def _threshold_block(t: float, groups: list[CandidateGroup], n_functions: int) -> dict:
    members = [m for g in groups for m in g.members]
    already = sum(len(g.members) for g in groups if g.specializability.value == "Already")
    newly = sum(len(g.members) for g in groups if g.specializability.value == "Newly")
    return {
        "threshold": t,
        "specializable": len(members),
        "percent": round(100.0 * len(members) / n_functions, 4) if n_functions else 0.0,
        "already": already,
        "newly": newly,
        "kinds": {c: sum(1 for m in members if m.kind is k) for c, k in KIND_COLUMNS},
        "patterns": {c: sum(1 for g in groups if g.pattern is p) for c, p in PATTERN_COLUMNS},
        "groups": [
            {
                "members": [{"name": m.name, "path": m.source_span[0], "span": list(m.source_span[1:]), "kind": m.kind.value} for m in g.members],
                "pattern": g.pattern.value,
                "specializability": g.specializability.value,
                "min_similarity": round(g.min_similarity, 6),
                **g.evidence,
            }
            for g in groups
        ],
    }


def analyze(paths, thresholds, name_sim: float = NAME_SIMILARITY, max_nodes: int = 20_000, jobs: int = 1) -> dict:
    thresholds = sorted(set(thresholds))
    return {
        "schema": SCHEMA,
        "config": {"thresholds": thresholds, "name_similarity": name_sim, "max_nodes": max_nodes},
        "projects": [analyze_project(p, thresholds, name_sim, max_nodes, jobs) for p in paths],
    }


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in report["projects"]:
        for r in p["results"]:
            row = [p["project"], r["threshold"], p["functions"], p["traits"], r["specializable"], r["percent"], r["already"], r["newly"]]
            row += [r["kinds"][c] for c, _ in KIND_COLUMNS]
            row += [r["patterns"][c] for c, _ in PATTERN_COLUMNS]
            row.append(p["seconds"])
            w.writerow(row)
    return buf.getvalue()


def emit_report(report: dict, fmt: str, out: str) -> None:
    text = json.dumps(report, indent=2) + "\n" if fmt == "json" else to_csv(report)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
