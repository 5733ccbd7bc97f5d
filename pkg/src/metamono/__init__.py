"""Compile-time trait specialization for Rust via meta-monomorphized traits."""

from .coherence import CallSiteSpec, CoherenceError, Diagnostic, Resolution, check_overlaps, resolve_call_site
from .frontend import ExpansionError, ExpansionResult, expand_program, parse_spec_marker, parse_when_attribute
from .predicate import Disjunct, Equality, canonicalize, compare_specificity, unify_disjuncts
from .synthesis import SpecializationRegistry, mangle_name

__version__ = "0.1.0"

__all__ = [
    "CallSiteSpec",
    "CoherenceError",
    "Diagnostic",
    "Disjunct",
    "Equality",
    "ExpansionError",
    "ExpansionResult",
    "Resolution",
    "SpecializationRegistry",
    "canonicalize",
    "check_overlaps",
    "compare_specificity",
    "expand_program",
    "mangle_name",
    "parse_spec_marker",
    "parse_when_attribute",
    "resolve_call_site",
    "unify_disjuncts",
]
