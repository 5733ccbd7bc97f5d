"""Detection of manual-specialization workarounds in Rust corpora."""

from .classify import Pattern, Specializability, classify_pattern, classify_specializability
from .grouping import group_candidates, name_similarity, similarity_score, stem
from .records import FnKind, FunctionRecord, build_function_records
from .report import analyze, emit_report
from .ted import tree_edit_distance
from .trees import LabeledTree

__all__ = [
    "FnKind",
    "FunctionRecord",
    "LabeledTree",
    "Pattern",
    "Specializability",
    "analyze",
    "build_function_records",
    "classify_pattern",
    "classify_specializability",
    "emit_report",
    "group_candidates",
    "name_similarity",
    "similarity_score",
    "stem",
    "tree_edit_distance",
]
